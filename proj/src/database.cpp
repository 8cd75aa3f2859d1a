#include "mfp/database.hpp"

#include "mfp/error.hpp"
#include "mfp/parallel.hpp"
#include "mfp/text_format.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace mfp {

namespace {

constexpr std::string_view format_version = "1";

GridAxis theta_axis(std::size_t position, double low, double high, int count)
{
    return {GridAxis::Kind::Theta, position, low, high, count};
}

GridAxis alpha_axis(std::size_t position, double low, double high, int count)
{
    return {GridAxis::Kind::Alpha, position, low, high, count};
}

std::string offset_message(std::size_t offset, const std::string& what)
{
    return "database parse error at byte offset " + std::to_string(offset) + ": " + what;
}

} // namespace

std::vector<double> parameter_grid(double low, double high, int count)
{
    if (count < 1) {
        throw ArgumentError("parameter_grid: count must be at least 1");
    }
    if (count == 1) {
        return {low};
    }
    if (!(low < high)) {
        throw ArgumentError("parameter_grid: low must be below high");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        values.push_back(low + k * (high - low) / (count - 1));
    }
    return values;
}

std::size_t ModelGrid::size() const
{
    std::size_t n = 1;
    for (const auto& axis : axes) {
        n *= static_cast<std::size_t>(axis.count);
    }
    return n;
}

std::vector<Params> ModelGrid::points() const
{
    std::vector<std::vector<double>> values;
    for (const auto& axis : axes) {
        values.push_back(parameter_grid(axis.low, axis.high, axis.count));
    }
    std::vector<Params> out;
    out.reserve(size());
    std::vector<std::size_t> index(axes.size(), 0);
    for (std::size_t n = 0; n < size(); ++n) {
        Params p{base_theta, base_alpha};
        for (std::size_t a = 0; a < axes.size(); ++a) {
            auto& slot = axes[a].kind == GridAxis::Kind::Theta ? p.theta : p.alpha;
            slot[axes[a].position] = quantize(values[a][index[a]]);
        }
        out.push_back(std::move(p));
        // Odometer with the last axis fastest.
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++index[a] < static_cast<std::size_t>(axes[a].count)) {
                break;
            }
            index[a] = 0;
        }
    }
    return out;
}

std::string ModelGrid::describe() const
{
    std::string out = "theta = " + format_list(base_theta) + "; alpha = " + format_list(base_alpha);
    for (const auto& axis : axes) {
        out += axis.kind == GridAxis::Kind::Theta ? "; theta[" : "; alpha[";
        out += std::to_string(axis.position) + "] " + format_real(axis.low) + ' ' + format_real(axis.high) + ' ' +
               std::to_string(axis.count);
    }
    return out;
}

std::vector<ModelGrid> standard_grids()
{
    return {
        {ModelId::Carroll, {1.0, 0.0, 0.0}, {}, {theta_axis(1, 0.1, 10.0, 10), theta_axis(2, 0.1, 10.0, 10)}},
        {ModelId::LopezPamies, {1.0}, {0.0}, {alpha_axis(0, 0.01, 10.0, 100)}},
        {ModelId::MooneyRivlin, {1.0, 0.0}, {}, {theta_axis(1, 0.1, 10.0, 100)}},
        {ModelId::NeoHookean, {1.0}, {}, {}},
        {ModelId::GenNeoHookean, {1.0}, {0.0, 0.0}, {alpha_axis(0, 0.01, 10.0, 20), alpha_axis(1, 0.5, 10.0, 20)}},
        {ModelId::Ogden, {1.0}, {0.0}, {alpha_axis(0, 1.0, 10.0, 100)}},
        {ModelId::Yeoh, {1.0, 0.0, 0.0}, {}, {theta_axis(1, 0.1, 10.0, 10), theta_axis(2, 0.1, 10.0, 10)}},
    };
}

std::vector<SweepPoint> standard_sweep()
{
    return sweep_for(all_models);
}

std::vector<SweepPoint> sweep_for(std::span<const ModelId> models)
{
    std::vector<SweepPoint> out;
    for (const auto& grid : standard_grids()) {
        if (std::find(models.begin(), models.end(), grid.model) == models.end()) {
            continue;
        }
        for (auto& p : grid.points()) {
            out.push_back({grid.model, std::move(p)});
        }
    }
    return out;
}

std::string format_list(std::span<const double> values)
{
    if (values.empty()) {
        return "-";
    }
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += format_real(values[i]);
    }
    return out;
}

DatabaseEntry simulate_entry(const Mesh& mesh, const ExperimentDescriptor& desc, const SweepPoint& point,
                             const SolverOptions& options)
{
    const SolutionSeries series = solve(mesh, desc, point.model, point.params, options);
    const auto sampled = sample_displacements(series, mesh, desc.sample_points);
    DatabaseEntry entry;
    entry.model = point.model;
    entry.alpha = point.params.alpha;
    entry.theta_db = point.params.theta;
    entry.fingerprint = assemble(series, sampled, desc.n_u, descriptor_hash(desc));
    entry.last_converged_step = series.last_converged_step;
    return entry;
}

Database generate(const ExperimentDescriptor& desc, const std::vector<SweepPoint>& points,
                  const GenerationOptions& options, std::vector<GenerationRecord>* report,
                  const std::function<void(const GenerationRecord&)>& on_done)
{
    validate(desc);
    const Mesh mesh = build_mesh(desc, options.edge_length);

    Database db;
    db.descriptor = desc;
    db.mesh_edge_length = options.edge_length;
    for (const auto& grid : standard_grids()) {
        const bool used = std::any_of(points.begin(), points.end(), [&](const SweepPoint& p) { return p.model == grid.model; });
        if (used) {
            db.grid_lines.push_back("grid." + std::string(to_token(grid.model)) + " = " + grid.describe());
        }
    }
    db.entries.resize(points.size());
    std::vector<GenerationRecord> records(points.size());
    std::mutex log_mutex;
    parallel_for(points.size(), options.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        db.entries[i] = simulate_entry(mesh, desc, points[i], options.solver);
        const auto stop = std::chrono::steady_clock::now();
        GenerationRecord& r = records[i];
        r.index = i;
        r.model = points[i].model;
        r.alpha = points[i].params.alpha;
        r.theta = points[i].params.theta;
        r.valid_steps = db.entries[i].last_converged_step;
        r.wall_seconds = std::chrono::duration<double>(stop - start).count();
        if (on_done) {
            const std::lock_guard<std::mutex> lock(log_mutex);
            on_done(r);
        }
    });
    if (report) {
        *report = std::move(records);
    }
    return db;
}

void write_database(std::ostream& out, const Database& db)
{
    out << "format_version = " << format_version << '\n';
    write_descriptor(out, db.descriptor);
    out << "layout = " << fingerprint_layout << '\n' << "mesh_edge_length = " << format_real(db.mesh_edge_length) << '\n';
    for (const auto& line : db.grid_lines) {
        out << line << '\n';
    }
    out << "n_d = " << db.entries.size() << '\n';
    const std::string hash = db.descriptor_hash();
    for (const auto& e : db.entries) {
        check_layout(e.fingerprint);
        if (e.fingerprint.n_t != db.descriptor.n_t || e.fingerprint.n_u != db.descriptor.n_u ||
            e.fingerprint.descriptor_hash != hash) {
            throw LayoutError("write_database: entry fingerprint does not belong to the database descriptor");
        }
        out << to_token(e.model);
        for (const double a : e.alpha) {
            out << ' ' << format_real(a);
        }
        for (const double t : e.theta_db) {
            out << ' ' << format_real(t);
        }
        out << ' ' << e.last_converged_step;
        for (const double v : e.fingerprint.f_R) {
            out << ' ' << format_real(v);
        }
        for (const double v : e.fingerprint.f_u) {
            out << ' ' << format_real(v);
        }
        out << '\n';
    }
}

std::string serialize(const Database& db)
{
    std::ostringstream out;
    write_database(out, db);
    return out.str();
}

void save(const Database& db, const std::string& path)
{
    write_file(path, serialize(db));
}

Database parse_database(std::string_view text, const ExperimentDescriptor* expected)
{
    std::map<std::string, std::string> kv;
    Database db;
    std::size_t offset = 0;
    std::size_t line_start = 0;
    auto next_line = [&](std::string_view& line) {
        if (offset >= text.size()) {
            return false;
        }
        line_start = offset;
        const std::size_t end = text.find('\n', offset);
        const std::size_t stop = end == std::string_view::npos ? text.size() : end;
        line = text.substr(offset, stop - offset);
        offset = end == std::string_view::npos ? text.size() : end + 1;
        return true;
    };

    std::string_view line;
    bool have_count = false;
    std::size_t n_d = 0;
    while (!have_count) {
        if (!next_line(line)) {
            throw ParseError(offset_message(text.size(), "manifest ended before 'n_d'"));
        }
        std::string_view key;
        std::string_view value;
        if (!split_key_value(line, key, value)) {
            throw ParseError(offset_message(line_start, "expected a 'key = value' manifest line"));
        }
        try {
            if (key == "n_d") {
                n_d = static_cast<std::size_t>(parse_integer(value));
                have_count = true;
            } else if (key.starts_with("grid.")) {
                db.grid_lines.emplace_back(trim(line));
            } else {
                kv[std::string(key)] = std::string(value);
            }
        } catch (const ParseError& e) {
            throw ParseError(offset_message(line_start, e.what()));
        }
    }
    try {
        const auto version = kv.find("format_version");
        if (version == kv.end() || version->second != format_version) {
            throw ParseError("unsupported or missing format_version");
        }
        const auto layout = kv.find("layout");
        if (layout == kv.end() || layout->second != fingerprint_layout) {
            throw ParseError("unsupported or missing layout");
        }
        db.descriptor = descriptor_from_manifest(kv);
        const auto edge = kv.find("mesh_edge_length");
        db.mesh_edge_length = edge == kv.end() ? 0.0 : parse_real(edge->second);
    } catch (const ParseError& e) {
        throw ParseError(offset_message(0, e.what()));
    }
    if (expected && descriptor_hash(*expected) != db.descriptor_hash()) {
        throw ProtocolMismatchError("database descriptor hash " + db.descriptor_hash() +
                                    " does not match the expected protocol " + descriptor_hash(*expected));
    }

    const std::string hash = db.descriptor_hash();
    const auto n_t = static_cast<std::size_t>(db.descriptor.n_t);
    const auto n_u = static_cast<std::size_t>(db.descriptor.n_u);
    db.entries.reserve(n_d);
    while (db.entries.size() < n_d) {
        if (!next_line(line)) {
            throw ParseError(offset_message(text.size(), "file ends after " + std::to_string(db.entries.size()) +
                                                             " of " + std::to_string(n_d) + " records"));
        }
        const auto fields = split_fields(line, " ");
        if (fields.empty()) {
            throw ParseError(offset_message(line_start, "empty record line"));
        }
        DatabaseEntry e;
        try {
            e.model = model_from_token(fields[0]);
        } catch (const ArgumentError&) {
            throw ParseError(offset_message(line_start, "unknown model token '" + std::string(fields[0]) + "'"));
        }
        const ModelSignature sig = signature(e.model);
        const std::size_t expected_fields = 1 + sig.n_alpha + sig.n_theta + 1 + 2 * n_t + 2 * n_u * n_t;
        if (fields.size() != expected_fields) {
            throw ParseError(offset_message(line_start, "record " + std::to_string(db.entries.size()) + " has " +
                                                            std::to_string(fields.size()) + " fields, expected " +
                                                            std::to_string(expected_fields)));
        }
        try {
            std::size_t f = 1;
            for (std::size_t k = 0; k < sig.n_alpha; ++k) {
                e.alpha.push_back(parse_real(fields[f++]));
            }
            for (std::size_t k = 0; k < sig.n_theta; ++k) {
                e.theta_db.push_back(parse_real(fields[f++]));
            }
            e.last_converged_step = static_cast<int>(parse_integer(fields[f++]));
            Fingerprint& fp = e.fingerprint;
            fp.n_t = db.descriptor.n_t;
            fp.n_u = db.descriptor.n_u;
            fp.valid_steps = e.last_converged_step;
            fp.descriptor_hash = hash;
            fp.f_R.reserve(2 * n_t);
            fp.f_u.reserve(2 * n_u * n_t);
            for (std::size_t k = 0; k < 2 * n_t; ++k) {
                fp.f_R.push_back(parse_real(fields[f++]));
            }
            for (std::size_t k = 0; k < 2 * n_u * n_t; ++k) {
                fp.f_u.push_back(parse_real(fields[f++]));
            }
            check_layout(fp);
        } catch (const Error& err) {
            throw ParseError(offset_message(line_start, "record " + std::to_string(db.entries.size()) + ": " + err.what()));
        }
        db.entries.push_back(std::move(e));
    }
    while (next_line(line)) {
        if (!trim(line).empty()) {
            throw ParseError(offset_message(line_start, "data after the last of " + std::to_string(n_d) + " records"));
        }
    }
    return db;
}

Database load(const std::string& path, const ExperimentDescriptor* expected)
{
    return parse_database(read_file(path), expected);
}

void write_generation_report(std::ostream& out, const std::vector<GenerationRecord>& report)
{
    out << "index,model,alpha,theta,valid_steps,wall_seconds\n";
    for (const auto& r : report) {
        out << r.index << ',' << to_token(r.model) << ',' << format_list(r.alpha) << ',' << format_list(r.theta) << ','
            << r.valid_steps << ',' << format_real(r.wall_seconds) << '\n';
    }
}

} // namespace mfp
