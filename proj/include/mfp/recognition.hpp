#pragma once

#include "mfp/database.hpp"

#include <iosfwd>
#include <string_view>
#include <vector>

namespace mfp {

enum class Measure { Cosine, Euclidean };

std::string_view to_token(Measure measure);
/// "cosine" or "euclidean"; throws ArgumentError otherwise.
Measure measure_from_token(std::string_view token);

struct ScoredEntry {
    std::size_t index = 0;
    double score = 0.0;
};

/// Weighted cosine similarity
///   cos(beta_R) / n_fR + cos(beta_u) / n_fu,  n_fR = 2 n_hat_t, n_fu = 2 n_u n_hat_t,
/// for every eligible entry (last_converged_step >= n_hat_t), in database
/// order. The cosines are evaluated as 1 - |a - b|^2 / 2 on the unit blocks,
/// which keeps full precision near a perfect match.
/// Throws ProtocolMismatchError for a foreign descriptor hash,
/// ArgumentError if n_hat_t exceeds f_star.valid_steps, DegenerateFingerprintError
/// for a zero block in f_star and EmptyCandidateError if nothing is eligible.
std::vector<ScoredEntry> cosine_scores(const Database& db, const Fingerprint& f_star, int n_hat_t);

/// Negative squared distance of the unit force blocks plus the squared
/// displacement distance relative to |f_u*|^2. Zero for an exact match.
/// Same preconditions and errors as cosine_scores.
std::vector<ScoredEntry> euclidean_scores(const Database& db, const Fingerprint& f_star, int n_hat_t);

std::vector<ScoredEntry> scores(const Database& db, const Fingerprint& f_star, int n_hat_t, Measure measure);

struct MatchResult {
    std::size_t best_index = 0;
    ModelId model = ModelId::NeoHookean;
    std::vector<double> alpha_star;
    /// Rescaled homogeneity parameters, N/mm^2.
    std::vector<double> theta_star;
    double similarity_score = 0.0;
    /// All eligible entries, best first; ties keep the lower index first.
    std::vector<ScoredEntry> ranked;
    Measure measure = Measure::Cosine;
    int n_hat_t = 0;
};

/// Best eligible entry and theta* = |f_R*| theta_db / |f_R(best)|, both norms
/// taken over the first n_hat_t steps.
MatchResult match(const Database& db, const Fingerprint& f_star, Measure measure, int n_hat_t);

struct RankRow {
    std::size_t rank = 0;
    std::size_t index = 0;
    ModelId model = ModelId::NeoHookean;
    std::vector<double> alpha;
    double score = 0.0;
};

/// The first min(top_k, ranked size) rows, ranks from 1.
std::vector<RankRow> rank_report(const Database& db, const MatchResult& result, std::size_t top_k);

/// Header rank,index,model,alpha,score; alpha values joined by spaces.
void write_ranking_csv(std::ostream& out, const std::vector<RankRow>& rows);

} // namespace mfp
