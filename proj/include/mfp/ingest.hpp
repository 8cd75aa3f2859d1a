#pragma once

#include "mfp/fingerprint.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mfp {

/// Regular displacement grid of one load stage (DIC output). Node (i, j) is
/// at (x0 + i dx, y0 + j dy) and stored at j * nx + i (rows of constant y).
struct DisplacementGrid {
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double dx = 1.0;
    double dy = 1.0;
    std::vector<double> ux;
    std::vector<double> uy;
    std::vector<char> valid;

    std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
};

/// Clamp displacement (mm, strictly increasing) against axis forces (N).
struct ForceCurve {
    std::vector<double> u_clamp;
    std::vector<double> rx;
    std::vector<double> ry;
};

/// Grid CSV with header x_mm,y_mm,ux_mm,uy_mm,valid, rows in row-major node
/// order. Throws ParseError naming `source` and the row on schema errors
/// and non-uniform spacing.
DisplacementGrid parse_grid_csv(std::string_view text, const std::string& source);
void write_grid_csv(std::ostream& out, const DisplacementGrid& grid);

/// Force CSV with header u_clamp_mm,Rx_N,Ry_N.
ForceCurve parse_force_csv(std::string_view text, const std::string& source);
void write_force_csv(std::ostream& out, const ForceCurve& curve);

struct ResampleStats {
    /// Points interpolated from a cell with one masked corner.
    std::size_t plane_fits = 0;
};

/// Bilinear interpolation at each point, as (u_x(p0), u_y(p0), u_x(p1), ...).
/// A cell with one masked corner uses the plane through the other three.
/// Throws DropoutError for a cell with two or more masked corners and
/// ExtrapolationError for a point outside the grid.
std::vector<double> resample_to_points(const DisplacementGrid& grid, std::span<const Vec2> points,
                                       ResampleStats* stats = nullptr);

/// Piecewise-linear forces at each target. Throws ExtrapolationError for a
/// target outside the sampled range and ArgumentError for a malformed curve.
std::vector<std::array<double, 2>> interpolate_forces(const ForceCurve& curve, std::span<const double> clamp_targets);

struct AggregationStats {
    /// Components that fell back to the arithmetic mean.
    std::size_t fallback_components = 0;
};

/// Componentwise geometric mean of |v| carrying the shared sign; mixed signs
/// or a zero fall back to the arithmetic mean. Identical inputs are
/// returned unchanged. Throws ArgumentError for no repetitions or lengths
/// that differ.
std::vector<double> aggregate_repetitions(const std::vector<std::vector<double>>& values,
                                          AggregationStats* stats = nullptr);

/// forces * t_database / t_experiment. Throws ArgumentError for a
/// non-positive thickness.
std::vector<double> scale_thickness(std::span<const double> forces, double t_experiment, double t_database);

/// Raw measurement of one specimen: grids[rep][stage - 1] and one force
/// curve per repetition.
struct MeasurementSet {
    std::vector<std::vector<DisplacementGrid>> grids;
    std::vector<ForceCurve> curves;
    /// Specimen thickness, mm.
    double thickness = 2.0;
};

struct IngestDiagnostics {
    std::size_t repetitions = 0;
    std::size_t displacement_fallbacks = 0;
    std::size_t force_fallbacks = 0;
    std::size_t plane_fits = 0;
};

/// Ingest pipeline: resample and aggregate displacements per stage,
/// interpolate forces at k u_max / n_t per repetition, aggregate, scale to
/// the descriptor thickness. The result has the full n_t layout with
/// valid_steps = n_hat_t and zeros beyond. Errors name the failing stage.
Fingerprint build_fingerprint(const MeasurementSet& input, const ExperimentDescriptor& desc, int n_hat_t,
                              IngestDiagnostics* diagnostics = nullptr);

/// Reads stage{K}_rep{R}.csv (K = 1..n_hat_t) and forces_rep{R}.csv from a
/// directory; repetitions are numbered from 1 without gaps. Throws
/// ParseError naming the first missing stage file.
MeasurementSet load_measurement_directory(const std::string& directory, int n_hat_t, double thickness);

/// Synthetic measurement of an FE solution: one repetition with grids of the
/// given spacing over [-half_extent, half_extent]^2 for stages 1..stages
/// (nodes outside the mesh are masked) and a force curve through the origin
/// and every converged step, rescaled to a specimen of `thickness`. Throws
/// ArgumentError if a requested stage did not converge.
MeasurementSet synthetic_measurement(const SolutionSeries& series, const Mesh& mesh, const ExperimentDescriptor& desc,
                                     double spacing, double half_extent, int stages, double thickness);

/// Writes a measurement set in the directory layout above.
void save_measurement_directory(const std::string& directory, const MeasurementSet& input);

} // namespace mfp
