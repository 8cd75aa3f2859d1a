#include "mfp/recognition.hpp"

#include "mfp/error.hpp"
#include "mfp/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>

namespace mfp {

namespace {

double norm(std::span<const double> v)
{
    double sum = 0.0;
    for (const double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

// Squared distance between a / |a| and b (b is already scaled).
double unit_distance2(std::span<const double> a, double norm_a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / norm_a - b[i];
        sum += d * d;
    }
    return sum;
}

double distance2(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

struct Candidate {
    std::size_t index = 0;
    /// Distance from a perfect match; smaller is better.
    double deficit = 0.0;
    double score = 0.0;
};

struct Query {
    std::size_t n_R = 0;
    std::size_t n_u = 0;
    std::vector<double> unit_R;
    std::vector<double> unit_u;
    std::span<const double> raw_u;
    double norm_R = 0.0;
    double norm_u = 0.0;
};

Query prepare(const Database& db, const Fingerprint& f_star, int n_hat_t)
{
    check_layout(f_star);
    if (f_star.descriptor_hash != db.descriptor_hash()) {
        throw ProtocolMismatchError("fingerprint descriptor hash " + f_star.descriptor_hash +
                                    " does not match the database protocol " + db.descriptor_hash());
    }
    if (f_star.n_u != db.descriptor.n_u) {
        throw ProtocolMismatchError("fingerprint n_u differs from the database");
    }
    if (n_hat_t < 1 || n_hat_t > f_star.valid_steps) {
        throw ArgumentError("n_hat_t = " + std::to_string(n_hat_t) + " must lie in [1, valid_steps = " +
                            std::to_string(f_star.valid_steps) + "]");
    }
    if (n_hat_t > db.descriptor.n_t) {
        throw ArgumentError("n_hat_t exceeds the database load program");
    }
    Query q;
    q.n_R = 2 * static_cast<std::size_t>(n_hat_t);
    q.n_u = 2 * static_cast<std::size_t>(f_star.n_u) * static_cast<std::size_t>(n_hat_t);
    const std::span<const double> raw_R(f_star.f_R.data(), q.n_R);
    q.raw_u = std::span<const double>(f_star.f_u.data(), q.n_u);
    q.norm_R = norm(raw_R);
    q.norm_u = norm(q.raw_u);
    if (!(q.norm_R > 0.0)) {
        throw DegenerateFingerprintError("query force block is zero over the first " + std::to_string(n_hat_t) +
                                         " steps");
    }
    if (!(q.norm_u > 0.0)) {
        throw DegenerateFingerprintError("query displacement block is zero over the first " +
                                         std::to_string(n_hat_t) + " steps");
    }
    for (const double v : raw_R) {
        q.unit_R.push_back(v / q.norm_R);
    }
    for (const double v : q.raw_u) {
        q.unit_u.push_back(v / q.norm_u);
    }
    return q;
}

std::vector<Candidate> evaluate(const Database& db, const Fingerprint& f_star, int n_hat_t, Measure measure)
{
    const Query q = prepare(db, f_star, n_hat_t);
    const double weight_R = 1.0 / static_cast<double>(q.n_R);
    const double weight_u = 1.0 / static_cast<double>(q.n_u);
    std::vector<Candidate> out;
    out.reserve(db.size());
    for (std::size_t i = 0; i < db.size(); ++i) {
        const DatabaseEntry& e = db.entries[i];
        if (e.last_converged_step < n_hat_t) {
            continue;
        }
        const std::span<const double> f_R(e.fingerprint.f_R.data(), q.n_R);
        const std::span<const double> f_u(e.fingerprint.f_u.data(), q.n_u);
        const double norm_R = norm(f_R);
        const double norm_u = norm(f_u);
        if (!(norm_R > 0.0) || !(norm_u > 0.0)) {
            continue;
        }
        Candidate c;
        c.index = i;
        const double dR = unit_distance2(f_R, norm_R, q.unit_R);
        if (measure == Measure::Cosine) {
            // cos = 1 - |a - b|^2 / 2 for unit vectors.
            const double du = unit_distance2(f_u, norm_u, q.unit_u);
            c.deficit = 0.5 * (weight_R * dR + weight_u * du);
            c.score = (weight_R + weight_u) - c.deficit;
        } else {
            const double du = distance2(f_u, q.raw_u) / (q.norm_u * q.norm_u);
            c.deficit = dR + du;
            c.score = -c.deficit;
        }
        out.push_back(c);
    }
    if (out.empty()) {
        throw EmptyCandidateError("no database entry has converged through step " + std::to_string(n_hat_t));
    }
    return out;
}

std::vector<ScoredEntry> to_scored(const std::vector<Candidate>& candidates)
{
    std::vector<ScoredEntry> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back({c.index, c.score});
    }
    return out;
}

} // namespace

std::string_view to_token(Measure measure)
{
    return measure == Measure::Cosine ? "cosine" : "euclidean";
}

Measure measure_from_token(std::string_view token)
{
    if (token == "cosine") {
        return Measure::Cosine;
    }
    if (token == "euclidean") {
        return Measure::Euclidean;
    }
    throw ArgumentError("unknown measure '" + std::string(token) + "' (expected cosine or euclidean)");
}

std::vector<ScoredEntry> cosine_scores(const Database& db, const Fingerprint& f_star, int n_hat_t)
{
    return to_scored(evaluate(db, f_star, n_hat_t, Measure::Cosine));
}

std::vector<ScoredEntry> euclidean_scores(const Database& db, const Fingerprint& f_star, int n_hat_t)
{
    return to_scored(evaluate(db, f_star, n_hat_t, Measure::Euclidean));
}

std::vector<ScoredEntry> scores(const Database& db, const Fingerprint& f_star, int n_hat_t, Measure measure)
{
    return to_scored(evaluate(db, f_star, n_hat_t, measure));
}

MatchResult match(const Database& db, const Fingerprint& f_star, Measure measure, int n_hat_t)
{
    std::vector<Candidate> candidates = evaluate(db, f_star, n_hat_t, measure);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.deficit < b.deficit; });

    MatchResult result;
    result.measure = measure;
    result.n_hat_t = n_hat_t;
    result.ranked = to_scored(candidates);
    result.best_index = candidates.front().index;
    result.similarity_score = candidates.front().score;

    const DatabaseEntry& best = db.entries[result.best_index];
    const auto n_R = 2 * static_cast<std::size_t>(n_hat_t);
    const double query_norm = norm(std::span<const double>(f_star.f_R.data(), n_R));
    const double entry_norm = norm(std::span<const double>(best.fingerprint.f_R.data(), n_R));
    result.model = best.model;
    result.alpha_star = best.alpha;
    for (const double theta : best.theta_db) {
        result.theta_star.push_back(query_norm * (theta / entry_norm));
    }
    return result;
}

std::vector<RankRow> rank_report(const Database& db, const MatchResult& result, std::size_t top_k)
{
    const std::size_t n = std::min(top_k, result.ranked.size());
    std::vector<RankRow> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const ScoredEntry& s = result.ranked[r];
        const DatabaseEntry& e = db.entries.at(s.index);
        rows.push_back({r + 1, s.index, e.model, e.alpha, s.score});
    }
    return rows;
}

void write_ranking_csv(std::ostream& out, const std::vector<RankRow>& rows)
{
    out << "rank,index,model,alpha,score\n";
    for (const auto& row : rows) {
        out << row.rank << ',' << row.index << ',' << to_token(row.model) << ',' << format_list(row.alpha) << ','
            << format_real(row.score) << '\n';
    }
}

} // namespace mfp
