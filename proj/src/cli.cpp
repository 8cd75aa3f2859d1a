#include "mfp/cli.hpp"

#include "mfp/database.hpp"
#include "mfp/error.hpp"
#include "mfp/ingest.hpp"
#include "mfp/recognition.hpp"
#include "mfp/text_format.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace mfp::cli {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
    std::string subcommand;
    std::string db;
    std::string out;
    std::string fingerprint;
    std::string input;
    std::string measure = "cosine";
    std::string models;
    std::string model;
    std::string theta;
    std::string alpha;
    std::optional<int> steps;
    int jobs = 1;
    std::optional<double> edge_length;
    std::optional<int> load_steps;
    std::optional<double> thickness;
    std::optional<double> dic_spacing;
    SolverOptions solver;
    double dic_extent = 20.0;
    bool quick = false;
    std::size_t top = std::numeric_limits<std::size_t>::max();
};

ExperimentDescriptor descriptor_for(const RunConfig& c)
{
    ExperimentDescriptor d = default_descriptor();
    const double increment = d.step_increment();
    if (c.quick) {
        d.n_t = quick_load_steps;
    }
    if (c.load_steps) {
        d.n_t = *c.load_steps;
    }
    // Fewer steps keep the 0.85 mm increment: the leading part of the program.
    d.u_max = increment * d.n_t;
    validate(d);
    return d;
}

double edge_length_for(const RunConfig& c)
{
    if (c.edge_length) {
        return *c.edge_length;
    }
    return c.quick ? quick_edge_length : GenerationOptions{}.edge_length;
}

std::vector<double> parse_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    for (const auto field : split_fields(text, ", ")) {
        try {
            out.push_back(parse_real(field));
        } catch (const ParseError&) {
            throw ArgumentError(std::string(what) + ": '" + std::string(field) + "' is not a number");
        }
    }
    return out;
}

std::vector<ModelId> parse_models(const std::string& text)
{
    if (text.empty() || text == "all") {
        return {all_models.begin(), all_models.end()};
    }
    std::vector<ModelId> out;
    for (const auto token : split_fields(text, ", ")) {
        out.push_back(model_from_token(token));
    }
    return out;
}

int count_stages(const std::string& directory)
{
    int k = 0;
    while (fs::exists(fs::path(directory) / ("stage" + std::to_string(k + 1) + "_rep1.csv"))) {
        ++k;
    }
    return k;
}

Fingerprint ingest_input(const RunConfig& c, const ExperimentDescriptor& desc, IngestDiagnostics* diag, int& stages)
{
    stages = c.steps ? *c.steps : std::min(count_stages(c.input), desc.n_t);
    if (stages < 1) {
        throw ParseError("stage 1: no stage1_rep1.csv in " + c.input);
    }
    const double thickness = c.thickness ? *c.thickness : desc.thickness;
    const MeasurementSet set = load_measurement_directory(c.input, stages, thickness);
    return build_fingerprint(set, desc, stages, diag);
}

Fingerprint query_for(const RunConfig& c, const Database& db)
{
    if (!c.fingerprint.empty() && !c.input.empty()) {
        throw ArgumentError("give either --fingerprint or --input, not both");
    }
    if (!c.fingerprint.empty()) {
        return read_fingerprint_file(c.fingerprint);
    }
    if (!c.input.empty()) {
        int stages = 0;
        return ingest_input(c, db.descriptor, nullptr, stages);
    }
    throw ArgumentError("a query is required: --fingerprint FILE or --input DIR");
}

int cmd_generate(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const ExperimentDescriptor desc = descriptor_for(c);
    const std::vector<ModelId> models = parse_models(c.models);
    const std::vector<SweepPoint> points = sweep_for(models);
    GenerationOptions options;
    options.edge_length = edge_length_for(c);
    options.jobs = c.jobs;
    options.solver = c.solver;
    fs::create_directories(c.out);

    const std::size_t total = points.size();
    std::size_t done = 0;
    std::vector<GenerationRecord> report;
    const auto start = std::chrono::steady_clock::now();
    const Database db = generate(desc, points, options, &report, [&](const GenerationRecord& r) {
        ++done;
        err << "[" << done << "/" << total << "] entry " << r.index << ' ' << to_token(r.model)
            << " alpha=" << format_list(r.alpha) << " theta=" << format_list(r.theta)
            << " valid_steps=" << r.valid_steps << " (" << r.wall_seconds << " s)\n";
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string db_path = (fs::path(c.out) / "database.mfp").string();
    save(db, db_path);
    std::ostringstream csv;
    write_generation_report(csv, report);
    write_file((fs::path(c.out) / "report.csv").string(), csv.str());

    std::size_t full = 0;
    for (const auto& e : db.entries) {
        full += e.last_converged_step == desc.n_t ? 1 : 0;
    }
    out << "database = " << db_path << '\n'
        << "n_d = " << db.size() << '\n'
        << "fully_converged = " << full << '\n'
        << "descriptor_hash = " << db.descriptor_hash() << '\n'
        << "generation_seconds = " << seconds << '\n';
    return Success;
}

void print_match(std::ostream& out, const MatchResult& r, double seconds)
{
    out << "index = " << r.best_index << '\n'
        << "model = " << to_token(r.model) << '\n'
        << "alpha* = " << format_list(r.alpha_star) << '\n'
        << "theta* = " << format_list(r.theta_star) << " N/mm^2\n"
        << "score = " << format_real(r.similarity_score) << '\n'
        << "measure = " << to_token(r.measure) << '\n'
        << "n_hat_t = " << r.n_hat_t << '\n'
        << "match_seconds = " << seconds << '\n';
}

MatchResult timed_match(const RunConfig& c, const Database& db, const Fingerprint& query, double& seconds)
{
    const int n_hat_t = c.steps ? *c.steps : query.valid_steps;
    const auto start = std::chrono::steady_clock::now();
    MatchResult r = match(db, query, measure_from_token(c.measure), n_hat_t);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

int cmd_match(const RunConfig& c, std::ostream& out)
{
    const Database db = load(c.db);
    const Fingerprint query = query_for(c, db);
    double seconds = 0.0;
    const MatchResult r = timed_match(c, db, query, seconds);
    print_match(out, r, seconds);
    const std::string ranking = c.out.empty() ? "ranking.csv" : c.out;
    std::ostringstream csv;
    write_ranking_csv(csv, rank_report(db, r, c.top));
    write_file(ranking, csv.str());
    out << "ranking = " << ranking << '\n';
    return Success;
}

int cmd_rank(const RunConfig& c, std::ostream& out)
{
    const Database db = load(c.db);
    const Fingerprint query = query_for(c, db);
    double seconds = 0.0;
    const MatchResult r = timed_match(c, db, query, seconds);
    std::ostringstream csv;
    write_ranking_csv(csv, rank_report(db, r, c.top));
    if (c.out.empty()) {
        out << csv.str();
    } else {
        write_file(c.out, csv.str());
    }
    return Success;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const ExperimentDescriptor desc = descriptor_for(c);
    const ModelId model = model_from_token(c.model);
    const Params params{parse_list(c.theta, "--theta"), parse_list(c.alpha, "--alpha")};
    check_signature(model, params);
    const Mesh mesh = build_mesh(desc, edge_length_for(c));
    const SolutionSeries series = solve(mesh, desc, model, params, c.solver);
    fs::create_directories(c.out);

    std::ostringstream forces;
    forces << "step,lambda,Rx,Ry\n";
    for (std::size_t k = 0; k < series.steps.size(); ++k) {
        const StepResult& s = series.steps[k];
        if (!s.converged) {
            break;
        }
        forces << (k + 1) << ',' << format_real(s.stretch) << ',' << format_real(s.reaction_x) << ','
               << format_real(s.reaction_y) << '\n';
    }
    write_file((fs::path(c.out) / "forces.csv").string(), forces.str());
    std::ostringstream dump;
    write_solution_csv(dump, series);
    write_file((fs::path(c.out) / "solution.csv").string(), dump.str());
    const Fingerprint fp = assemble(series, sample_displacements(series, mesh, desc.sample_points), desc.n_u,
                                    descriptor_hash(desc));
    write_fingerprint_file((fs::path(c.out) / "fingerprint.txt").string(), fp);
    if (c.dic_spacing && series.last_converged_step > 0) {
        const double thickness = c.thickness ? *c.thickness : desc.thickness;
        const MeasurementSet set = synthetic_measurement(series, mesh, desc, *c.dic_spacing, c.dic_extent,
                                                         series.last_converged_step, thickness);
        save_measurement_directory((fs::path(c.out) / "measurement").string(), set);
    }
    out << "nodes = " << mesh.nodes.size() << '\n'
        << "last_converged_step = " << series.last_converged_step << '\n'
        << "n_t = " << desc.n_t << '\n'
        << "descriptor_hash = " << descriptor_hash(desc) << '\n';
    if (series.last_converged_step < desc.n_t) {
        err << "solver failed to converge at step " << series.last_converged_step + 1 << " (last converged step "
            << series.last_converged_step << ")\n";
        return SolverFailure;
    }
    return Success;
}

int cmd_ingest(const RunConfig& c, std::ostream& out)
{
    const ExperimentDescriptor desc = c.db.empty() ? descriptor_for(c) : load(c.db).descriptor;
    IngestDiagnostics diag;
    int stages = 0;
    const Fingerprint fp = ingest_input(c, desc, &diag, stages);
    write_fingerprint_file(c.out, fp);
    const double thickness = c.thickness ? *c.thickness : desc.thickness;
    out << "fingerprint = " << c.out << '\n'
        << "stages = " << stages << '\n'
        << "repetitions = " << diag.repetitions << '\n'
        << "thickness_factor = " << format_real(desc.thickness / thickness) << '\n'
        << "displacement_fallback_components = " << diag.displacement_fallbacks << '\n'
        << "force_fallback_components = " << diag.force_fallbacks << '\n'
        << "plane_fit_points = " << diag.plane_fits << '\n'
        << "descriptor_hash = " << fp.descriptor_hash << '\n';
    return Success;
}

int cmd_inspect(const RunConfig& c, std::ostream& out)
{
    if (!c.db.empty()) {
        const Database db = load(c.db);
        out << "n_d = " << db.size() << '\n'
            << "descriptor_hash = " << db.descriptor_hash() << '\n'
            << "n_t = " << db.descriptor.n_t << '\n'
            << "n_u = " << db.descriptor.n_u << '\n'
            << "n_f = " << 2 * db.descriptor.n_t + 2 * db.descriptor.n_u * db.descriptor.n_t << '\n'
            << "mesh_edge_length = " << format_real(db.mesh_edge_length) << '\n';
        std::map<int, std::size_t> valid;
        for (const ModelId m : all_models) {
            std::size_t count = 0;
            for (const auto& e : db.entries) {
                count += e.model == m ? 1 : 0;
            }
            out << "entries." << to_token(m) << " = " << count << '\n';
        }
        for (const auto& e : db.entries) {
            ++valid[e.last_converged_step];
        }
        for (const auto& [steps, count] : valid) {
            out << "valid_steps." << steps << " = " << count << '\n';
        }
        return Success;
    }
    if (!c.fingerprint.empty()) {
        const Fingerprint fp = read_fingerprint_file(c.fingerprint);
        out << "n_t = " << fp.n_t << '\n'
            << "n_u = " << fp.n_u << '\n'
            << "n_f = " << fp.size() << '\n'
            << "valid_steps = " << fp.valid_steps << '\n'
            << "descriptor_hash = " << fp.descriptor_hash << '\n';
        return Success;
    }
    throw ArgumentError("inspect needs --db or --fingerprint");
}

std::string find_config(const std::vector<std::string>& args)
{
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].starts_with("--config=")) {
            return args[i].substr(9);
        }
    }
    return {};
}

} // namespace

std::vector<std::string> config_arguments(const std::string& text, const std::string& source)
{
    std::vector<std::string> out;
    std::size_t line_no = 0;
    for (auto line : split_exact(text, '\n')) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        std::string_view key;
        std::string_view value;
        if (!split_key_value(line, key, value) || key.empty()) {
            throw ParseError(source + ": line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        if (key == "config") {
            throw ParseError(source + ": line " + std::to_string(line_no) + ": nested config files are not supported");
        }
        if (value == "true" || value == "false") {
            if (value == "true") {
                out.push_back("--" + std::string(key));
            }
            continue;
        }
        out.push_back("--" + std::string(key));
        out.emplace_back(value);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    CLI::App app{"Material fingerprinting: database generation and model discovery", "mfp"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path;
    auto common = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", config_path, "key = value file; command-line flags take precedence");
        sub->add_flag("--quick", c.quick, "coarse mesh and 10 load steps");
        sub->add_option("--edge-length", c.edge_length, "target mesh edge length, mm")->check(CLI::Range(0.25, 10.0));
        sub->add_option("--load-steps", c.load_steps, "number of load steps n_t (changes the protocol)");
        sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    };
    auto solver = [&](CLI::App* sub) {
        sub->add_option("--tol-abs", c.solver.tol_abs, "absolute Newton tolerance, N/mm")->check(CLI::PositiveNumber);
        sub->add_option("--tol-rel", c.solver.tol_rel, "Newton tolerance relative to the first residual")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-iterations", c.solver.max_iterations, "Newton iterations per load increment")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-bisections", c.solver.max_bisections, "halvings of a failed load increment")
            ->check(CLI::NonNegativeNumber);
    };
    auto query = [&](CLI::App* sub) {
        sub->add_option("--db", c.db, "database file")->required();
        sub->add_option("--fingerprint", c.fingerprint, "serialized fingerprint to match");
        sub->add_option("--input", c.input, "measurement directory to ingest and match");
        sub->add_option("--thickness", c.thickness, "specimen thickness of --input, mm")->check(CLI::PositiveNumber);
        sub->add_option("--measure", c.measure, "cosine or euclidean")->check(CLI::IsMember({"cosine", "euclidean"}));
        sub->add_option("--steps", c.steps, "n_hat_t, defaults to the query's valid steps");
        sub->add_option("--top", c.top, "rows of the ranking to write");
    };

    CLI::App* gen = app.add_subcommand("generate", "simulate the parameter sweep and write the database");
    common(gen);
    solver(gen);
    gen->add_option("--out", c.out, "output directory")->required();
    gen->add_option("--models", c.models, "comma-separated model tokens (default all)");

    CLI::App* mat = app.add_subcommand("match", "discover the model of a fingerprint");
    common(mat);
    query(mat);
    mat->add_option("--out", c.out, "ranking CSV path (default ranking.csv)");

    CLI::App* rnk = app.add_subcommand("rank", "write the similarity ranking of a fingerprint");
    common(rnk);
    query(rnk);
    rnk->add_option("--out", c.out, "ranking CSV path (default stdout)");

    CLI::App* sim = app.add_subcommand("simulate", "solve one material and write forces and its fingerprint");
    common(sim);
    solver(sim);
    sim->add_option("--model", c.model, "model token")->required();
    sim->add_option("--theta", c.theta, "homogeneity parameters, N/mm^2, comma-separated")->required();
    sim->add_option("--alpha", c.alpha, "non-homogeneity parameters, comma-separated");
    sim->add_option("--out", c.out, "output directory")->required();
    sim->add_option("--dic-spacing", c.dic_spacing, "also write synthetic grids of this spacing, mm")
        ->check(CLI::PositiveNumber);
    sim->add_option("--dic-extent", c.dic_extent, "half width of the synthetic grids, mm")->check(CLI::PositiveNumber);
    sim->add_option("--thickness", c.thickness, "thickness of the synthetic specimen, mm")->check(CLI::PositiveNumber);

    CLI::App* ing = app.add_subcommand("ingest", "turn grid and force CSV files into a fingerprint");
    common(ing);
    ing->add_option("--input", c.input, "measurement directory")->required();
    ing->add_option("--out", c.out, "fingerprint file")->required();
    ing->add_option("--db", c.db, "take the protocol from this database");
    ing->add_option("--steps", c.steps, "stages to ingest (default all consecutive stages)");
    ing->add_option("--thickness", c.thickness, "specimen thickness, mm")->check(CLI::PositiveNumber);

    CLI::App* ins = app.add_subcommand("inspect", "summarize a database or fingerprint file");
    ins->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    ins->add_option("--db", c.db, "database file");
    ins->add_option("--fingerprint", c.fingerprint, "fingerprint file");

    try {
        std::vector<std::string> argv = args;
        const std::string config = find_config(args);
        if (!config.empty() && argv.size() >= 2) {
            // File values go first so that later command-line flags win.
            const auto extra = config_arguments(read_file(config), config);
            argv.insert(argv.begin() + 2, extra.begin(), extra.end());
        }
        std::vector<std::string> reversed(argv.rbegin(), argv.rend() - 1);
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return Success;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help();
            return Success;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << '\n';
            return Failure;
        }
        if (*gen) {
            return cmd_generate(c, out, err);
        }
        if (*mat) {
            return cmd_match(c, out);
        }
        if (*rnk) {
            return cmd_rank(c, out);
        }
        if (*sim) {
            return cmd_simulate(c, out, err);
        }
        if (*ing) {
            return cmd_ingest(c, out);
        }
        return cmd_inspect(c, out);
    } catch (const ProtocolMismatchError& e) {
        err << "protocol mismatch: " << e.what() << '\n';
        return ProtocolMismatch;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return SchemaError;
    } catch (const LayoutError& e) {
        err << "input error: " << e.what() << '\n';
        return SchemaError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

} // namespace mfp::cli
