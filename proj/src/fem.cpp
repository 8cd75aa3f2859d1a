#include "mfp/fem.hpp"

#include "mfp/error.hpp"
#include "mfp/text_format.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace mfp {

namespace {

using Vec = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;
using ElementGrad = Eigen::Matrix<double, 6, 2>;

// Three-point rule on the triangle, exact for quadratics.
constexpr std::array<std::array<double, 3>, 3> gauss_points{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};

ElementGrad shape_gradients(const std::array<double, 3>& L, const std::array<Vec2, 3>& dL)
{
    ElementGrad g;
    for (int i = 0; i < 3; ++i) {
        g.row(i) = (4.0 * L[static_cast<std::size_t>(i)] - 1.0) * dL[static_cast<std::size_t>(i)].transpose();
    }
    g.row(3) = 4.0 * (L[0] * dL[1] + L[1] * dL[0]).transpose();
    g.row(4) = 4.0 * (L[1] * dL[2] + L[2] * dL[1]).transpose();
    g.row(5) = 4.0 * (L[2] * dL[0] + L[0] * dL[2]).transpose();
    return g;
}

struct QuadraturePoint {
    ElementGrad grad;
    double weight = 0.0;
};

// Residual and tangent assembly for one mesh, with a fixed sparsity pattern
// for the free-free block.
class Assembler {
public:
    Assembler(const Mesh& mesh, ModelId model, const Params& params, const SolverOptions& options)
        : mesh_(mesh), model_(model), params_(params), options_(options)
    {
        const std::size_t n_nodes = mesh.node_count();
        free_index_.assign(2 * n_nodes, -1);
        int next = 0;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            if (!mesh.on_boundary(static_cast<int>(i))) {
                free_index_[2 * i] = next++;
                free_index_[2 * i + 1] = next++;
            }
        }
        n_free_ = next;

        quadrature_.reserve(mesh.elements.size() * 3);
        for (const auto& e : mesh.elements) {
            const Vec2& p0 = mesh.nodes[static_cast<std::size_t>(e[0])];
            const Vec2& p1 = mesh.nodes[static_cast<std::size_t>(e[1])];
            const Vec2& p2 = mesh.nodes[static_cast<std::size_t>(e[2])];
            const double twice_area = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
            const std::array<Vec2, 3> dL{
                Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / twice_area,
                Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / twice_area,
                Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / twice_area,
            };
            for (const auto& L : gauss_points) {
                quadrature_.push_back({shape_gradients(L, dL), twice_area / 6.0});
            }
        }

        std::vector<Eigen::Triplet<double>> triplets;
        for (const auto& e : mesh.elements) {
            const auto dofs = element_dofs(e);
            for (const int r : dofs) {
                for (const int c : dofs) {
                    const int fr = free_index_[static_cast<std::size_t>(r)];
                    const int fc = free_index_[static_cast<std::size_t>(c)];
                    if (fr >= 0 && fc >= 0) {
                        triplets.emplace_back(fr, fc, 0.0);
                    }
                }
            }
        }
        tangent_.resize(n_free_, n_free_);
        tangent_.setFromTriplets(triplets.begin(), triplets.end());
        tangent_.makeCompressed();

        slots_.reserve(mesh.elements.size() * 144);
        for (const auto& e : mesh.elements) {
            const auto dofs = element_dofs(e);
            for (const int c : dofs) {
                for (const int r : dofs) {
                    const int fr = free_index_[static_cast<std::size_t>(r)];
                    const int fc = free_index_[static_cast<std::size_t>(c)];
                    slots_.push_back(fr >= 0 && fc >= 0 ? value_slot(fr, fc) : -1);
                }
            }
        }
    }

    int free_count() const { return n_free_; }

    /// Noise level of the last assembled residual in double precision:
    /// a multiple of eps times the summed magnitudes of the quadrature
    /// contributions at the free dofs.
    double roundoff_floor() const
    {
        double sum = 0.0;
        for (Eigen::Index d = 0; d < magnitude_.size(); ++d) {
            if (free_index_[static_cast<std::size_t>(d)] >= 0) {
                sum += magnitude_(d) * magnitude_(d);
            }
        }
        return 16384.0 * std::numeric_limits<double>::epsilon() * std::sqrt(sum);
    }
    int free_index(std::size_t dof) const { return free_index_[dof]; }
    SparseMat& tangent() { return tangent_; }

    /// Internal force vector (all dofs, per unit thickness); optionally the
    /// free-free tangent. Returns false on element inversion or when the
    /// energy leaves its domain.
    bool assemble(const Vec& u, Vec& internal, bool with_tangent)
    {
        internal.setZero(u.size());
        magnitude_.setZero(u.size());
        if (with_tangent) {
            std::fill(tangent_.valuePtr(), tangent_.valuePtr() + tangent_.nonZeros(), 0.0);
        }
        try {
            for (std::size_t el = 0; el < mesh_.elements.size(); ++el) {
                const auto dofs = element_dofs(mesh_.elements[el]);
                Eigen::Matrix<double, 12, 1> ue;
                for (int k = 0; k < 12; ++k) {
                    ue(k) = u(dofs[static_cast<std::size_t>(k)]);
                }
                Eigen::Matrix<double, 12, 1> fe = Eigen::Matrix<double, 12, 1>::Zero();
                Eigen::Matrix<double, 12, 1> me = Eigen::Matrix<double, 12, 1>::Zero();
                Eigen::Matrix<double, 12, 12> ke = Eigen::Matrix<double, 12, 12>::Zero();
                for (int q = 0; q < 3; ++q) {
                    const QuadraturePoint& qp = quadrature_[el * 3 + static_cast<std::size_t>(q)];
                    Mat2 F = Mat2::Identity();
                    for (int a = 0; a < 6; ++a) {
                        F.row(0) += ue(2 * a) * qp.grad.row(a);
                        F.row(1) += ue(2 * a + 1) * qp.grad.row(a);
                    }
                    const Mat2 P = piola_condensed_2d(model_, F, params_);
                    if (!P.allFinite()) {
                        return false;
                    }
                    for (int a = 0; a < 6; ++a) {
                        fe(2 * a) += qp.weight * P.row(0).dot(qp.grad.row(a));
                        fe(2 * a + 1) += qp.weight * P.row(1).dot(qp.grad.row(a));
                        me(2 * a) += qp.weight * P.row(0).cwiseAbs().dot(qp.grad.row(a).cwiseAbs());
                        me(2 * a + 1) += qp.weight * P.row(1).cwiseAbs().dot(qp.grad.row(a).cwiseAbs());
                    }
                    if (with_tangent) {
                        const Eigen::Matrix4d A = material_tangent(F);
                        // G maps element dofs to the flattened displacement gradient (i*2 + J).
                        Eigen::Matrix<double, 4, 12> G = Eigen::Matrix<double, 4, 12>::Zero();
                        for (int b = 0; b < 6; ++b) {
                            G(0, 2 * b) = qp.grad(b, 0);
                            G(1, 2 * b) = qp.grad(b, 1);
                            G(2, 2 * b + 1) = qp.grad(b, 0);
                            G(3, 2 * b + 1) = qp.grad(b, 1);
                        }
                        ke.noalias() += qp.weight * (G.transpose() * A * G);
                    }
                }
                for (int k = 0; k < 12; ++k) {
                    internal(dofs[static_cast<std::size_t>(k)]) += fe(k);
                    magnitude_(dofs[static_cast<std::size_t>(k)]) += me(k);
                }
                if (with_tangent) {
                    const int* slot = &slots_[el * 144];
                    double* values = tangent_.valuePtr();
                    for (int c = 0; c < 12; ++c) {
                        for (int r = 0; r < 12; ++r) {
                            const int s = slot[c * 12 + r];
                            if (s >= 0) {
                                values[s] += ke(r, c);
                            }
                        }
                    }
                }
            }
        } catch (const KinematicsError&) {
            return false;
        } catch (const DomainError&) {
            return false;
        } catch (const NumericError&) {
            return false;
        }
        return internal.allFinite();
    }

private:
    static std::array<int, 12> element_dofs(const std::array<int, 6>& e)
    {
        std::array<int, 12> dofs{};
        for (std::size_t a = 0; a < 6; ++a) {
            dofs[2 * a] = 2 * e[a];
            dofs[2 * a + 1] = 2 * e[a] + 1;
        }
        return dofs;
    }

    int value_slot(int row, int col) const
    {
        const int* inner = tangent_.innerIndexPtr();
        const int begin = tangent_.outerIndexPtr()[col];
        const int end = tangent_.outerIndexPtr()[col + 1];
        const int* found = std::lower_bound(inner + begin, inner + end, row);
        return static_cast<int>(found - inner);
    }

    // Central differences of the condensed Piola stress with respect to F,
    // symmetrized (major symmetry of a hyperelastic tangent).
    Eigen::Matrix4d material_tangent(const Mat2& F) const
    {
        Eigen::Matrix4d A;
        for (int k = 0; k < 2; ++k) {
            for (int L = 0; L < 2; ++L) {
                const double h = options_.fd_step * std::max(1.0, std::abs(F(k, L)));
                Mat2 Fp = F;
                Mat2 Fm = F;
                Fp(k, L) += h;
                Fm(k, L) -= h;
                const Mat2 dP = (piola_condensed_2d(model_, Fp, params_) - piola_condensed_2d(model_, Fm, params_)) /
                                (Fp(k, L) - Fm(k, L));
                const int col = 2 * k + L;
                A(0, col) = dP(0, 0);
                A(1, col) = dP(0, 1);
                A(2, col) = dP(1, 0);
                A(3, col) = dP(1, 1);
            }
        }
        return 0.5 * (A + A.transpose());
    }

    const Mesh& mesh_;
    ModelId model_;
    const Params& params_;
    SolverOptions options_;
    std::vector<int> free_index_;
    int n_free_ = 0;
    std::vector<QuadraturePoint> quadrature_;
    SparseMat tangent_;
    std::vector<int> slots_;
    Vec magnitude_;
};

class StepSolver {
public:
    StepSolver(const Mesh& mesh, const ExperimentDescriptor& desc, ModelId model, const Params& params,
               const SolverOptions& options)
        : mesh_(mesh), desc_(desc), options_(options), assembler_(mesh, model, params, options)
    {
        const std::size_t n = mesh.node_count();
        reference_.resize(static_cast<Eigen::Index>(2 * n));
        for (std::size_t i = 0; i < n; ++i) {
            reference_(static_cast<Eigen::Index>(2 * i)) = mesh.nodes[i].x();
            reference_(static_cast<Eigen::Index>(2 * i + 1)) = mesh.nodes[i].y();
        }
        u_ = Vec::Zero(reference_.size());
        right_ = mesh.nodes_on(EdgeRight);
        top_ = mesh.nodes_on(EdgeTop);
        for (std::size_t i = 0; i < n; ++i) {
            if (mesh.on_boundary(static_cast<int>(i))) {
                constrained_.push_back(static_cast<int>(i));
            }
        }
    }

    SolutionSeries run()
    {
        const LoadProgram program = load_program(desc_);
        SolutionSeries series;
        series.steps.resize(program.size());
        double lambda_done = 1.0;
        bool failed = false;
        for (std::size_t k = 0; k < program.size(); ++k) {
            StepResult& step = series.steps[k];
            step.stretch = program.stretches[k];
            if (failed) {
                continue;
            }
            int iterations = 0;
            if (!advance(lambda_done, program.stretches[k], iterations)) {
                failed = true;
                step.newton_iterations = iterations;
                continue;
            }
            lambda_done = program.stretches[k];
            finish_step(step, iterations);
            series.last_converged_step = static_cast<int>(k) + 1;
        }
        return series;
    }

private:
    // Moves from lambda_from to lambda_to, bisecting failed increments.
    bool advance(double lambda_from, double lambda_to, int& iterations)
    {
        double done = lambda_from;
        double increment = lambda_to - lambda_from;
        int depth = 0;
        while (done < lambda_to) {
            double target = done + increment;
            if (target >= lambda_to - 1e-14 * lambda_to) {
                target = lambda_to;
            }
            const Vec saved = u_;
            const bool has_history = history_.size() != 0;
            const Vec saved_history = history_;
            const double saved_history_step = history_step_;
            int used = 0;
            if (newton(done, target, used)) {
                iterations += used;
                history_ = u_ - saved - (target - done) * reference_;
                history_step_ = target - done;
                done = target;
                continue;
            }
            iterations += used;
            u_ = saved;
            history_ = has_history ? saved_history : Vec();
            history_step_ = saved_history_step;
            if (depth == options_.max_bisections) {
                return false;
            }
            increment *= 0.5;
            ++depth;
        }
        return true;
    }

    void set_boundary(double lambda)
    {
        for (const int node : constrained_) {
            const auto i = static_cast<Eigen::Index>(2 * node);
            u_(i) = (lambda - 1.0) * reference_(i);
            u_(i + 1) = (lambda - 1.0) * reference_(i + 1);
        }
    }

    double free_norm(const Vec& internal) const
    {
        double sum = 0.0;
        for (Eigen::Index d = 0; d < internal.size(); ++d) {
            if (assembler_.free_index(static_cast<std::size_t>(d)) >= 0) {
                sum += internal(d) * internal(d);
            }
        }
        return std::sqrt(sum);
    }

    bool newton(double lambda_from, double lambda_to, int& iterations)
    {
        const double delta = lambda_to - lambda_from;
        const Vec start = u_;
        // Affine increment plus extrapolation of the last non-affine increment.
        if (history_.size() == u_.size() && history_step_ > 0.0) {
            u_ = start + delta * reference_ + (delta / history_step_) * history_;
            set_boundary(lambda_to);
            if (!assembler_.assemble(u_, internal_, false)) {
                u_ = start + delta * reference_;
                set_boundary(lambda_to);
                if (!assembler_.assemble(u_, internal_, false)) {
                    return false;
                }
            }
        } else {
            u_ = start + delta * reference_;
            set_boundary(lambda_to);
            if (!assembler_.assemble(u_, internal_, false)) {
                return false;
            }
        }

        double residual = free_norm(internal_);
        const double tolerance = options_.tol_abs + options_.tol_rel * residual;
        // Below the noise floor Newton stops contracting; a stalled iterate
        // there is as converged as double precision allows.
        double floor = assembler_.roundoff_floor();
        bool stalled = false;
        const double divergence = 1e8 * std::max(residual, 1.0);
        Eigen::SimplicialLDLT<SparseMat> solver;
        bool analyzed = false;
        Vec rhs(assembler_.free_count());
        Vec trial;
        Vec trial_internal;
        for (int it = 0; it < options_.max_iterations; ++it) {
            if (residual <= tolerance || (residual <= floor && stalled)) {
                return true;
            }
            ++iterations;
            if (!assembler_.assemble(u_, internal_, true)) {
                return false;
            }
            if (!analyzed) {
                solver.analyzePattern(assembler_.tangent());
                analyzed = true;
            }
            solver.factorize(assembler_.tangent());
            if (solver.info() != Eigen::Success) {
                return false;
            }
            for (Eigen::Index d = 0; d < internal_.size(); ++d) {
                const int f = assembler_.free_index(static_cast<std::size_t>(d));
                if (f >= 0) {
                    rhs(f) = -internal_(d);
                }
            }
            const Vec du = solver.solve(rhs);
            if (!du.allFinite()) {
                return false;
            }
            // Backtrack only to stay inside the admissible set.
            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 8 && !accepted; ++ls, step *= 0.5) {
                trial = u_;
                for (Eigen::Index d = 0; d < trial.size(); ++d) {
                    const int f = assembler_.free_index(static_cast<std::size_t>(d));
                    if (f >= 0) {
                        trial(d) += step * du(f);
                    }
                }
                accepted = assembler_.assemble(trial, trial_internal, false);
            }
            if (!accepted) {
                return false;
            }
            u_.swap(trial);
            internal_.swap(trial_internal);
            const double previous = residual;
            residual = free_norm(internal_);
            floor = assembler_.roundoff_floor();
            stalled = residual > 0.25 * previous;
            if (!std::isfinite(residual) || residual > divergence) {
                return false;
            }
        }
        return residual <= tolerance || (residual <= floor && stalled);
    }

    void finish_step(StepResult& step, int iterations)
    {
        step.converged = true;
        step.newton_iterations = iterations;
        step.displacement.assign(u_.data(), u_.data() + u_.size());
        step.residual_norm = free_norm(internal_);
        double rx = 0.0;
        double ry = 0.0;
        for (const int node : right_) {
            rx += internal_(2 * node);
        }
        for (const int node : top_) {
            ry += internal_(2 * node + 1);
        }
        step.reaction_x = desc_.thickness * rx;
        step.reaction_y = desc_.thickness * ry;
        Vec2 sum = Vec2::Zero();
        for (const int node : constrained_) {
            sum += Vec2(internal_(2 * node), internal_(2 * node + 1));
        }
        step.constraint_force_sum = sum;
    }

    const Mesh& mesh_;
    const ExperimentDescriptor& desc_;
    SolverOptions options_;
    Assembler assembler_;
    Vec reference_;
    Vec u_;
    Vec internal_;
    Vec history_;
    double history_step_ = 0.0;
    std::vector<int> right_;
    std::vector<int> top_;
    std::vector<int> constrained_;
};

} // namespace

SolutionSeries solve(const Mesh& mesh, const ExperimentDescriptor& desc, ModelId model, const Params& params,
                     const SolverOptions& options)
{
    check_signature(model, params);
    validate(desc);
    StepSolver solver(mesh, desc, model, params, options);
    return solver.run();
}

std::array<double, 6> quadratic_shape_functions(const std::array<double, 3>& L)
{
    return {
        L[0] * (2.0 * L[0] - 1.0), L[1] * (2.0 * L[1] - 1.0), L[2] * (2.0 * L[2] - 1.0),
        4.0 * L[0] * L[1],         4.0 * L[1] * L[2],         4.0 * L[2] * L[0],
    };
}

std::vector<PointLocation> locate_points(const Mesh& mesh, std::span<const Vec2> points)
{
    std::vector<PointLocation> out;
    out.reserve(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        const Vec2& p = points[j];
        PointLocation loc;
        for (std::size_t el = 0; el < mesh.elements.size() && loc.element < 0; ++el) {
            const auto& e = mesh.elements[el];
            const Vec2& a = mesh.nodes[static_cast<std::size_t>(e[0])];
            const Vec2& b = mesh.nodes[static_cast<std::size_t>(e[1])];
            const Vec2& c = mesh.nodes[static_cast<std::size_t>(e[2])];
            const double twice_area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
            const double l0 = ((b - p).x() * (c - p).y() - (b - p).y() * (c - p).x()) / twice_area;
            const double l1 = ((c - p).x() * (a - p).y() - (c - p).y() * (a - p).x()) / twice_area;
            const double l2 = 1.0 - l0 - l1;
            constexpr double slack = -1e-12;
            if (l0 >= slack && l1 >= slack && l2 >= slack) {
                loc.element = static_cast<int>(el);
                loc.area_coords = {l0, l1, l2};
            }
        }
        if (loc.element < 0) {
            throw DescriptorError("sample point " + std::to_string(j) + " (" + std::to_string(p.x()) + ", " +
                                  std::to_string(p.y()) + ") is not inside the mesh");
        }
        out.push_back(loc);
    }
    return out;
}

std::vector<double> interpolate_displacements(const Mesh& mesh, std::span<const double> displacement,
                                              std::span<const PointLocation> locations)
{
    std::vector<double> out;
    out.reserve(2 * locations.size());
    for (const auto& loc : locations) {
        const auto& e = mesh.elements[static_cast<std::size_t>(loc.element)];
        const auto N = quadratic_shape_functions(loc.area_coords);
        double ux = 0.0;
        double uy = 0.0;
        for (std::size_t a = 0; a < 6; ++a) {
            const auto node = static_cast<std::size_t>(e[a]);
            ux += N[a] * displacement[2 * node];
            uy += N[a] * displacement[2 * node + 1];
        }
        out.push_back(ux);
        out.push_back(uy);
    }
    return out;
}

std::vector<std::vector<double>> sample_displacements(const SolutionSeries& series, const Mesh& mesh,
                                                      std::span<const Vec2> points)
{
    const auto locations = locate_points(mesh, points);
    std::vector<std::vector<double>> out;
    out.reserve(series.steps.size());
    for (const auto& step : series.steps) {
        if (step.converged) {
            out.push_back(interpolate_displacements(mesh, step.displacement, locations));
        } else {
            out.emplace_back(2 * points.size(), 0.0);
        }
    }
    return out;
}

void write_solution_csv(std::ostream& out, const SolutionSeries& series)
{
    out << "step,lambda,R_x,R_y,newton_iters,converged\n";
    for (std::size_t k = 0; k < series.steps.size(); ++k) {
        const auto& s = series.steps[k];
        out << (k + 1) << ',' << format_real(s.stretch) << ',' << format_real(s.reaction_x) << ','
            << format_real(s.reaction_y) << ',' << s.newton_iterations << ',' << (s.converged ? 1 : 0) << '\n';
    }
}

} // namespace mfp
