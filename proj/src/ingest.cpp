#include "mfp/ingest.hpp"

#include "mfp/error.hpp"
#include "mfp/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace mfp {

namespace {

namespace fs = std::filesystem;

struct CsvTable {
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> row_lines;
};

// Splits the text into comma-separated rows and maps the required columns;
// `columns` receives the position of each name.
CsvTable read_csv(std::string_view text, const std::string& source, std::span<const std::string_view> names,
                  std::vector<std::size_t>& columns)
{
    CsvTable table;
    bool have_header = false;
    std::size_t line_no = 0;
    for (auto line : split_exact(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto fields = split_exact(line, ',');
        for (auto& f : fields) {
            f = trim(f);
        }
        if (!have_header) {
            have_header = true;
            columns.clear();
            for (const auto name : names) {
                const auto it = std::find(fields.begin(), fields.end(), name);
                if (it == fields.end()) {
                    throw ParseError(source + ": missing column '" + std::string(name) + "'");
                }
                columns.push_back(static_cast<std::size_t>(it - fields.begin()));
            }
            continue;
        }
        const std::size_t needed = *std::max_element(columns.begin(), columns.end()) + 1;
        if (fields.size() < needed) {
            throw ParseError(source + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, expected at least " + std::to_string(needed));
        }
        table.rows.push_back(std::move(fields));
        table.row_lines.push_back(line_no);
    }
    if (!have_header) {
        throw ParseError(source + ": empty file");
    }
    return table;
}

double field_real(const CsvTable& t, std::size_t row, std::size_t column, const std::string& source)
{
    try {
        return parse_real(t.rows[row][column]);
    } catch (const ParseError& e) {
        throw ParseError(source + ": row " + std::to_string(t.row_lines[row]) + ": " + e.what());
    }
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& prefix, const E& e)
{
    throw E(prefix + e.what());
}

std::string point_label(std::size_t j, const Vec2& p)
{
    return "point " + std::to_string(j) + " (" + format_real(p.x()) + ", " + format_real(p.y()) + ")";
}

// Cell index and local coordinate along one axis; throws outside the grid.
bool locate_axis(double coord, double origin, double spacing, int count, int& cell, double& local)
{
    const double f = (coord - origin) / spacing;
    const double slack = 1e-9;
    if (!(f >= -slack && f <= (count - 1) + slack)) {
        return false;
    }
    cell = std::clamp(static_cast<int>(std::floor(f)), 0, count - 2);
    local = std::clamp(f - cell, 0.0, 1.0);
    return true;
}

double geometric_mean(std::span<const double> magnitudes)
{
    const auto n = magnitudes.size();
    double product = 1.0;
    for (const double m : magnitudes) {
        product *= m;
    }
    if (std::isfinite(product) && product > 0.0) {
        if (n == 1) {
            return product;
        }
        if (n == 2) {
            return std::sqrt(product);
        }
        if (n == 4) {
            return std::sqrt(std::sqrt(product));
        }
        return std::pow(product, 1.0 / static_cast<double>(n));
    }
    double log_sum = 0.0;
    for (const double m : magnitudes) {
        log_sum += std::log(m);
    }
    return std::exp(log_sum / static_cast<double>(n));
}

} // namespace

DisplacementGrid parse_grid_csv(std::string_view text, const std::string& source)
{
    static constexpr std::array<std::string_view, 5> names{"x_mm", "y_mm", "ux_mm", "uy_mm", "valid"};
    std::vector<std::size_t> col;
    const CsvTable t = read_csv(text, source, names, col);
    const std::size_t n = t.rows.size();
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    DisplacementGrid g;
    g.ux.resize(n);
    g.uy.resize(n);
    g.valid.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        xs[r] = field_real(t, r, col[0], source);
        ys[r] = field_real(t, r, col[1], source);
        const auto flag = t.rows[r][col[4]];
        if (flag != "0" && flag != "1") {
            throw ParseError(source + ": row " + std::to_string(t.row_lines[r]) + ": valid must be 0 or 1");
        }
        g.valid[r] = flag == "1" ? 1 : 0;
        if (g.valid[r]) {
            g.ux[r] = field_real(t, r, col[2], source);
            g.uy[r] = field_real(t, r, col[3], source);
        }
    }
    std::size_t nx = 1;
    while (nx < n && ys[nx] == ys[0]) {
        ++nx;
    }
    if (nx < 2 || n % nx != 0 || n / nx < 2) {
        throw ParseError(source + ": nodes are not a row-major grid with at least 2 x 2 nodes");
    }
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(n / nx);
    g.x0 = xs[0];
    g.y0 = ys[0];
    g.dx = (xs[nx - 1] - xs[0]) / static_cast<double>(nx - 1);
    g.dy = (ys[n - 1] - ys[0]) / static_cast<double>(g.ny - 1);
    if (!(g.dx > 0.0) || !(g.dy > 0.0)) {
        throw ParseError(source + ": grid coordinates must increase along x within a row and along y across rows");
    }
    const double tol_x = 1e-6 * std::max(1.0, std::abs(g.x0) + g.dx * g.nx);
    const double tol_y = 1e-6 * std::max(1.0, std::abs(g.y0) + g.dy * g.ny);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t r = g.node(i, j);
            if (std::abs(xs[r] - (g.x0 + i * g.dx)) > tol_x || std::abs(ys[r] - (g.y0 + j * g.dy)) > tol_y) {
                throw ParseError(source + ": row " + std::to_string(t.row_lines[r]) +
                                 ": node is off the uniform grid");
            }
        }
    }
    return g;
}

void write_grid_csv(std::ostream& out, const DisplacementGrid& grid)
{
    out << "x_mm,y_mm,ux_mm,uy_mm,valid\n";
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t r = grid.node(i, j);
            out << format_real(grid.x0 + i * grid.dx) << ',' << format_real(grid.y0 + j * grid.dy) << ',';
            if (grid.valid[r]) {
                out << format_real(grid.ux[r]) << ',' << format_real(grid.uy[r]) << ",1\n";
            } else {
                out << ",,0\n";
            }
        }
    }
}

ForceCurve parse_force_csv(std::string_view text, const std::string& source)
{
    static constexpr std::array<std::string_view, 3> names{"u_clamp_mm", "Rx_N", "Ry_N"};
    std::vector<std::size_t> col;
    const CsvTable t = read_csv(text, source, names, col);
    ForceCurve c;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        c.u_clamp.push_back(field_real(t, r, col[0], source));
        c.rx.push_back(field_real(t, r, col[1], source));
        c.ry.push_back(field_real(t, r, col[2], source));
        if (r > 0 && !(c.u_clamp[r] > c.u_clamp[r - 1])) {
            throw ParseError(source + ": row " + std::to_string(t.row_lines[r]) +
                             ": clamp displacement must increase strictly");
        }
    }
    if (c.u_clamp.empty()) {
        throw ParseError(source + ": no samples");
    }
    return c;
}

void write_force_csv(std::ostream& out, const ForceCurve& curve)
{
    out << "u_clamp_mm,Rx_N,Ry_N\n";
    for (std::size_t k = 0; k < curve.u_clamp.size(); ++k) {
        out << format_real(curve.u_clamp[k]) << ',' << format_real(curve.rx[k]) << ',' << format_real(curve.ry[k])
            << '\n';
    }
}

std::vector<double> resample_to_points(const DisplacementGrid& grid, std::span<const Vec2> points,
                                       ResampleStats* stats)
{
    std::vector<double> out;
    out.reserve(2 * points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        const Vec2& p = points[j];
        int ci = 0;
        int cj = 0;
        double s = 0.0;
        double t = 0.0;
        if (!locate_axis(p.x(), grid.x0, grid.dx, grid.nx, ci, s) ||
            !locate_axis(p.y(), grid.y0, grid.dy, grid.ny, cj, t)) {
            throw ExtrapolationError(point_label(j, p) + " lies outside the displacement grid");
        }
        const std::array<std::size_t, 4> corner{grid.node(ci, cj), grid.node(ci + 1, cj), grid.node(ci, cj + 1),
                                                grid.node(ci + 1, cj + 1)};
        int masked = -1;
        int n_masked = 0;
        for (int k = 0; k < 4; ++k) {
            if (!grid.valid[corner[static_cast<std::size_t>(k)]]) {
                masked = k;
                ++n_masked;
            }
        }
        if (n_masked >= 2) {
            throw DropoutError(point_label(j, p) + ": DIC data is unavailable (" + std::to_string(n_masked) +
                               " of 4 surrounding nodes masked)");
        }
        if (n_masked == 1 && stats) {
            ++stats->plane_fits;
        }
        for (const auto* field : {&grid.ux, &grid.uy}) {
            const double v00 = (*field)[corner[0]];
            const double v10 = (*field)[corner[1]];
            const double v01 = (*field)[corner[2]];
            const double v11 = (*field)[corner[3]];
            double v = 0.0;
            switch (masked) {
            case 0:
                v = v10 + v01 - v11 + (v11 - v01) * s + (v11 - v10) * t;
                break;
            case 1:
                v = v00 + (v11 - v01) * s + (v01 - v00) * t;
                break;
            case 2:
                v = v00 + (v10 - v00) * s + (v11 - v10) * t;
                break;
            case 3:
                v = v00 + (v10 - v00) * s + (v01 - v00) * t;
                break;
            default:
                v = (1.0 - s) * (1.0 - t) * v00 + s * (1.0 - t) * v10 + (1.0 - s) * t * v01 + s * t * v11;
                break;
            }
            out.push_back(v);
        }
    }
    return out;
}

std::vector<std::array<double, 2>> interpolate_forces(const ForceCurve& curve, std::span<const double> clamp_targets)
{
    const std::size_t n = curve.u_clamp.size();
    if (n == 0 || curve.rx.size() != n || curve.ry.size() != n) {
        throw ArgumentError("interpolate_forces: empty curve or columns of different length");
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (!(curve.u_clamp[k] > curve.u_clamp[k - 1])) {
            throw ArgumentError("interpolate_forces: clamp displacements must increase strictly");
        }
    }
    const double lo = curve.u_clamp.front();
    const double hi = curve.u_clamp.back();
    // Absorbs the rounding of targets and samples written at 9 digits.
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));
    std::vector<std::array<double, 2>> out;
    out.reserve(clamp_targets.size());
    for (const double target : clamp_targets) {
        if (!(target >= lo - slack && target <= hi + slack)) {
            throw ExtrapolationError("clamp displacement " + format_real(target) + " mm lies outside the force curve [" +
                                     format_real(lo) + ", " + format_real(hi) + "]");
        }
        const double u = std::clamp(target, lo, hi);
        const auto it = std::lower_bound(curve.u_clamp.begin(), curve.u_clamp.end(), u);
        const auto k = static_cast<std::size_t>(it - curve.u_clamp.begin());
        if (it != curve.u_clamp.end() && *it == u) {
            out.push_back({curve.rx[k], curve.ry[k]});
            continue;
        }
        const std::size_t a = k - 1;
        const double w = (u - curve.u_clamp[a]) / (curve.u_clamp[k] - curve.u_clamp[a]);
        out.push_back({curve.rx[a] + w * (curve.rx[k] - curve.rx[a]), curve.ry[a] + w * (curve.ry[k] - curve.ry[a])});
    }
    return out;
}

std::vector<double> aggregate_repetitions(const std::vector<std::vector<double>>& values, AggregationStats* stats)
{
    if (values.empty()) {
        throw ArgumentError("aggregate_repetitions: no repetitions");
    }
    const std::size_t width = values.front().size();
    for (std::size_t r = 1; r < values.size(); ++r) {
        if (values[r].size() != width) {
            throw ArgumentError("aggregate_repetitions: repetition " + std::to_string(r + 1) + " has " +
                                std::to_string(values[r].size()) + " values, expected " + std::to_string(width));
        }
    }
    std::vector<double> out(width);
    std::vector<double> magnitudes(values.size());
    for (std::size_t c = 0; c < width; ++c) {
        const double first = values.front()[c];
        bool equal = true;
        bool positive = true;
        bool negative = true;
        for (std::size_t r = 0; r < values.size(); ++r) {
            const double v = values[r][c];
            equal = equal && v == first;
            positive = positive && v > 0.0;
            negative = negative && v < 0.0;
            magnitudes[r] = std::abs(v);
        }
        if (equal) {
            out[c] = first;
        } else if (positive || negative) {
            const double g = geometric_mean(magnitudes);
            out[c] = positive ? g : -g;
        } else {
            double sum = 0.0;
            for (std::size_t r = 0; r < values.size(); ++r) {
                sum += values[r][c];
            }
            out[c] = sum / static_cast<double>(values.size());
            if (stats) {
                ++stats->fallback_components;
            }
        }
    }
    return out;
}

std::vector<double> scale_thickness(std::span<const double> forces, double t_experiment, double t_database)
{
    if (!(t_experiment > 0.0) || !(t_database > 0.0)) {
        throw ArgumentError("scale_thickness: thicknesses must be positive");
    }
    const double factor = t_database / t_experiment;
    std::vector<double> out;
    out.reserve(forces.size());
    for (const double f : forces) {
        out.push_back(f * factor);
    }
    return out;
}

Fingerprint build_fingerprint(const MeasurementSet& input, const ExperimentDescriptor& desc, int n_hat_t,
                              IngestDiagnostics* diagnostics)
{
    validate(desc);
    if (n_hat_t < 1 || n_hat_t > desc.n_t) {
        throw ArgumentError("build_fingerprint: n_hat_t = " + std::to_string(n_hat_t) + " outside [1, " +
                            std::to_string(desc.n_t) + "]");
    }
    const std::size_t reps = input.grids.size();
    if (reps == 0) {
        throw ArgumentError("build_fingerprint: no repetitions");
    }
    if (input.curves.size() != reps) {
        throw ArgumentError("build_fingerprint: " + std::to_string(reps) + " displacement repetitions but " +
                            std::to_string(input.curves.size()) + " force curves");
    }
    IngestDiagnostics diag;
    diag.repetitions = reps;

    Fingerprint fp;
    fp.n_t = desc.n_t;
    fp.n_u = desc.n_u;
    fp.valid_steps = n_hat_t;
    fp.descriptor_hash = descriptor_hash(desc);
    fp.f_R.assign(2 * static_cast<std::size_t>(desc.n_t), 0.0);
    fp.f_u.assign(2 * static_cast<std::size_t>(desc.n_u) * static_cast<std::size_t>(desc.n_t), 0.0);

    const std::size_t width = 2 * static_cast<std::size_t>(desc.n_u);
    for (int k = 1; k <= n_hat_t; ++k) {
        std::vector<std::vector<double>> per_rep;
        for (std::size_t r = 0; r < reps; ++r) {
            const std::string where =
                "stage " + std::to_string(k) + ", repetition " + std::to_string(r + 1) + ": ";
            if (input.grids[r].size() < static_cast<std::size_t>(k)) {
                throw ArgumentError(where + "no displacement grid");
            }
            ResampleStats rs;
            try {
                per_rep.push_back(resample_to_points(input.grids[r][static_cast<std::size_t>(k - 1)],
                                                     desc.sample_points, &rs));
            } catch (const DropoutError& e) {
                rethrow_with(where, e);
            } catch (const ExtrapolationError& e) {
                rethrow_with(where, e);
            }
            diag.plane_fits += rs.plane_fits;
        }
        AggregationStats as;
        const std::vector<double> u = aggregate_repetitions(per_rep, &as);
        diag.displacement_fallbacks += as.fallback_components;
        std::copy(u.begin(), u.end(), fp.f_u.begin() + static_cast<std::ptrdiff_t>(width * static_cast<std::size_t>(k - 1)));
    }

    const LoadProgram program = load_program(desc);
    const std::span<const double> targets(program.clamp_displacements.data(), static_cast<std::size_t>(n_hat_t));
    std::vector<std::vector<double>> per_rep;
    for (std::size_t r = 0; r < reps; ++r) {
        std::vector<std::array<double, 2>> forces;
        try {
            forces = interpolate_forces(input.curves[r], targets);
        } catch (const ExtrapolationError& e) {
            rethrow_with("force curve of repetition " + std::to_string(r + 1) + ": ", e);
        }
        std::vector<double> flat;
        for (const auto& f : forces) {
            flat.push_back(f[0]);
            flat.push_back(f[1]);
        }
        per_rep.push_back(std::move(flat));
    }
    AggregationStats as;
    const std::vector<double> aggregated = aggregate_repetitions(per_rep, &as);
    diag.force_fallbacks = as.fallback_components;
    const std::vector<double> scaled = scale_thickness(aggregated, input.thickness, desc.thickness);
    std::copy(scaled.begin(), scaled.end(), fp.f_R.begin());

    quantize(fp.f_R);
    quantize(fp.f_u);
    if (diagnostics) {
        *diagnostics = diag;
    }
    return fp;
}

MeasurementSet synthetic_measurement(const SolutionSeries& series, const Mesh& mesh, const ExperimentDescriptor& desc,
                                     double spacing, double half_extent, int stages, double thickness)
{
    if (!(spacing > 0.0) || !(half_extent > 0.0) || !(thickness > 0.0)) {
        throw ArgumentError("synthetic_measurement: spacing, extent and thickness must be positive");
    }
    if (stages < 1 || stages > series.last_converged_step) {
        throw ArgumentError("synthetic_measurement: stages = " + std::to_string(stages) + " but only " +
                            std::to_string(series.last_converged_step) + " steps converged");
    }
    const int count = static_cast<int>(std::floor(2.0 * half_extent / spacing + 1e-9)) + 1;
    DisplacementGrid base;
    base.nx = count;
    base.ny = count;
    base.x0 = -half_extent;
    base.y0 = -half_extent;
    base.dx = spacing;
    base.dy = spacing;
    base.valid.assign(static_cast<std::size_t>(count) * static_cast<std::size_t>(count), 0);

    std::vector<std::size_t> located_nodes;
    std::vector<PointLocation> locations;
    for (int j = 0; j < count; ++j) {
        for (int i = 0; i < count; ++i) {
            const Vec2 p(base.x0 + i * spacing, base.y0 + j * spacing);
            try {
                const std::array<Vec2, 1> one{p};
                locations.push_back(locate_points(mesh, one).front());
                located_nodes.push_back(base.node(i, j));
                base.valid[base.node(i, j)] = 1;
            } catch (const DescriptorError&) {
                // Inside the slot: no material, no data.
            }
        }
    }

    MeasurementSet set;
    set.thickness = thickness;
    set.grids.emplace_back();
    const double force_scale = thickness / desc.thickness;
    const LoadProgram program = load_program(desc);
    for (int k = 1; k <= stages; ++k) {
        const StepResult& step = series.steps[static_cast<std::size_t>(k - 1)];
        const std::vector<double> u = interpolate_displacements(mesh, step.displacement, locations);
        DisplacementGrid g = base;
        g.ux.assign(g.valid.size(), 0.0);
        g.uy.assign(g.valid.size(), 0.0);
        for (std::size_t n = 0; n < located_nodes.size(); ++n) {
            g.ux[located_nodes[n]] = u[2 * n];
            g.uy[located_nodes[n]] = u[2 * n + 1];
        }
        set.grids.front().push_back(std::move(g));
    }
    ForceCurve curve;
    curve.u_clamp.push_back(0.0);
    curve.rx.push_back(0.0);
    curve.ry.push_back(0.0);
    for (int k = 1; k <= series.last_converged_step; ++k) {
        const StepResult& step = series.steps[static_cast<std::size_t>(k - 1)];
        curve.u_clamp.push_back(program.clamp_displacements[static_cast<std::size_t>(k - 1)]);
        curve.rx.push_back(step.reaction_x * force_scale);
        curve.ry.push_back(step.reaction_y * force_scale);
    }
    set.curves.push_back(std::move(curve));
    return set;
}

MeasurementSet load_measurement_directory(const std::string& directory, int n_hat_t, double thickness)
{
    const fs::path dir(directory);
    auto stage_file = [&](int k, std::size_t r) {
        return dir / ("stage" + std::to_string(k) + "_rep" + std::to_string(r) + ".csv");
    };
    MeasurementSet set;
    set.thickness = thickness;
    for (std::size_t r = 1; fs::exists(stage_file(1, r)); ++r) {
        std::vector<DisplacementGrid> stages;
        for (int k = 1; k <= n_hat_t; ++k) {
            const fs::path file = stage_file(k, r);
            if (!fs::exists(file)) {
                throw ParseError("stage " + std::to_string(k) + ": missing " + file.string());
            }
            stages.push_back(parse_grid_csv(read_file(file.string()), file.string()));
        }
        const fs::path forces = dir / ("forces_rep" + std::to_string(r) + ".csv");
        if (!fs::exists(forces)) {
            throw ParseError("missing " + forces.string());
        }
        set.curves.push_back(parse_force_csv(read_file(forces.string()), forces.string()));
        set.grids.push_back(std::move(stages));
    }
    if (set.grids.empty()) {
        throw ParseError("stage 1: missing " + stage_file(1, 1).string());
    }
    return set;
}

void save_measurement_directory(const std::string& directory, const MeasurementSet& input)
{
    const fs::path dir(directory);
    fs::create_directories(dir);
    for (std::size_t r = 0; r < input.grids.size(); ++r) {
        for (std::size_t k = 0; k < input.grids[r].size(); ++k) {
            std::ostringstream out;
            write_grid_csv(out, input.grids[r][k]);
            write_file((dir / ("stage" + std::to_string(k + 1) + "_rep" + std::to_string(r + 1) + ".csv")).string(),
                       out.str());
        }
    }
    for (std::size_t r = 0; r < input.curves.size(); ++r) {
        std::ostringstream out;
        write_force_csv(out, input.curves[r]);
        write_file((dir / ("forces_rep" + std::to_string(r + 1) + ".csv")).string(), out.str());
    }
}

} // namespace mfp
