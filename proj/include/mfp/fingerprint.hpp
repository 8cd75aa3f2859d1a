#pragma once

#include "mfp/fem.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

/// Layout tag written into every fingerprint and database file.
inline constexpr std::string_view fingerprint_layout = "rxry-per-step;steps-points-xy";

/// Force block f_R = (R_x(1), R_y(1), R_x(2), ...) in N and displacement block
/// f_u = per step, per point, (u_x, u_y) in mm. Entries past valid_steps are
/// exactly zero. Values are stored at 9 significant digits so that the text
/// form round-trips bit for bit.
struct Fingerprint {
    int n_t = 0;
    int n_u = 0;
    std::vector<double> f_R;
    std::vector<double> f_u;
    int valid_steps = 0;
    std::string descriptor_hash;

    std::size_t size() const { return f_R.size() + f_u.size(); }
    /// f = [f_R; f_u].
    std::vector<double> concatenated() const;

    bool operator==(const Fingerprint&) const = default;
};

/// Throws LayoutError if the block lengths disagree with n_t and n_u.
void check_layout(const Fingerprint& fp);

/// Builds the fingerprint from a solved series and the per-step sampled
/// displacements. valid_steps = last_converged_step and everything after it
/// is zero-filled. Throws LayoutError on mismatched lengths.
Fingerprint assemble(const SolutionSeries& series, const std::vector<std::vector<double>>& sampled, int n_u,
                     std::string descriptor_hash);

/// Reduced fingerprint with the first n_hat_t steps of both blocks. Throws
/// ArgumentError unless 1 <= n_hat_t <= n_t.
Fingerprint truncate(const Fingerprint& fp, int n_hat_t);

struct NormalizedBlocks {
    std::vector<double> unit_R;
    std::vector<double> unit_u;
    double norm_R = 0.0;
    double norm_u = 0.0;
};

/// Unit force and displacement blocks plus their norms. Throws
/// DegenerateFingerprintError if either block is zero.
NormalizedBlocks normalize_blocks(const Fingerprint& fp);

/// Multiplies the force block by a (the image of theta -> a theta).
Fingerprint scale_forces(const Fingerprint& fp, double a);

void write_fingerprint(std::ostream& out, const Fingerprint& fp);
std::string serialize(const Fingerprint& fp);

/// Throws ParseError on malformed text and LayoutError on inconsistent
/// lengths.
Fingerprint parse_fingerprint(std::string_view text);
Fingerprint read_fingerprint_file(const std::string& path);
void write_fingerprint_file(const std::string& path, const Fingerprint& fp);

} // namespace mfp
