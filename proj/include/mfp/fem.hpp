#pragma once

#include "mfp/constitutive.hpp"
#include "mfp/specimen.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace mfp {

struct SolverOptions {
    /// Absolute residual tolerance per unit thickness (N/mm).
    double tol_abs = 1e-9;
    /// Relative to the first residual of each load increment. Convergence is
    /// also accepted at the double-precision floor of the assembled residual.
    double tol_rel = 1e-10;
    int max_iterations = 25;
    /// Halvings of a failed load increment before giving up.
    int max_bisections = 4;
    /// Relative step of the central-difference material tangent.
    double fd_step = 1e-7;
};

struct StepResult {
    double stretch = 1.0;
    /// Total nodal displacements (u_x, u_y) per node, mm.
    std::vector<double> displacement;
    /// Axis reaction forces, N.
    double reaction_x = 0.0;
    double reaction_y = 0.0;
    /// Sum of all constrained-node residual forces per unit thickness, N/mm.
    Vec2 constraint_force_sum = Vec2::Zero();
    double residual_norm = 0.0;
    int newton_iterations = 0;
    bool converged = false;
};

/// Per-step solution of the standardized experiment. Converged steps form a
/// prefix; steps after the first failure carry no displacement data.
struct SolutionSeries {
    std::vector<StepResult> steps;
    int last_converged_step = 0;
};

/// Solves the load program under affine Dirichlet data u = (lambda - 1) X on
/// the whole outer boundary. Failures to converge (after bisection) truncate
/// the series rather than throwing. Throws ParameterError for parameters
/// that do not fit the model.
SolutionSeries solve(const Mesh& mesh, const ExperimentDescriptor& desc, ModelId model, const Params& params,
                     const SolverOptions& options = {});

/// Element and local coordinates of a point inside the mesh.
struct PointLocation {
    int element = -1;
    std::array<double, 3> area_coords{};
};

/// Throws DescriptorError if a point lies outside every element.
std::vector<PointLocation> locate_points(const Mesh& mesh, std::span<const Vec2> points);

/// Quadratic-triangle interpolation of a nodal displacement vector at the
/// located points, as (u_x(p0), u_y(p0), u_x(p1), ...).
std::vector<double> interpolate_displacements(const Mesh& mesh, std::span<const double> displacement,
                                              std::span<const PointLocation> locations);

/// Displacements at the points for every step; unconverged steps yield
/// zeros. Throws DescriptorError if a point lies outside the mesh.
std::vector<std::vector<double>> sample_displacements(const SolutionSeries& series, const Mesh& mesh,
                                                      std::span<const Vec2> points);

/// Shape function values N_0..N_5 of the 6-node triangle at area
/// coordinates (L0, L1, L2).
std::array<double, 6> quadratic_shape_functions(const std::array<double, 3>& area_coords);

/// Debug dump: step,lambda,R_x,R_y,newton_iters,converged.
void write_solution_csv(std::ostream& out, const SolutionSeries& series);

} // namespace mfp
