#pragma once

#include "mfp/fingerprint.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

/// Equidistant values low + k (high - low) / (count - 1), both endpoints
/// included; count = 1 yields (low). Throws ArgumentError for count < 1 or,
/// when count > 1, low >= high.
std::vector<double> parameter_grid(double low, double high, int count);

/// One swept parameter of a model grid.
struct GridAxis {
    enum class Kind { Theta, Alpha };
    Kind kind = Kind::Theta;
    std::size_t position = 0;
    double low = 0.0;
    double high = 0.0;
    int count = 1;
};

/// Tensor-product grid of one model: theta starts at `base_theta` and the
/// axes fill their slots; the first axis varies slowest.
struct ModelGrid {
    ModelId model = ModelId::NeoHookean;
    std::vector<double> base_theta;
    std::vector<double> base_alpha;
    std::vector<GridAxis> axes;

    std::size_t size() const;
    std::vector<Params> points() const;
    /// Manifest text, e.g. "theta[1] 1.00000000e-01 1.00000000e+01 10; ...".
    std::string describe() const;
};

/// The seven model grids in database row order.
std::vector<ModelGrid> standard_grids();

struct SweepPoint {
    ModelId model = ModelId::NeoHookean;
    Params params;
};

/// All 901 sweep points in database order.
std::vector<SweepPoint> standard_sweep();

/// standard_sweep restricted to the given models (order kept).
std::vector<SweepPoint> sweep_for(std::span<const ModelId> models);

struct DatabaseEntry {
    ModelId model = ModelId::NeoHookean;
    std::vector<double> alpha;
    std::vector<double> theta_db;
    Fingerprint fingerprint;
    int last_converged_step = 0;

    bool operator==(const DatabaseEntry&) const = default;
};

/// Fingerprints of one standardized experiment. Entries are indexed from 0
/// in sweep order.
struct Database {
    ExperimentDescriptor descriptor;
    double mesh_edge_length = 0.0;
    std::vector<std::string> grid_lines;
    std::vector<DatabaseEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::string descriptor_hash() const { return mfp::descriptor_hash(descriptor); }

    bool operator==(const Database&) const = default;
};

struct GenerationOptions {
    double edge_length = 3.0;
    SolverOptions solver;
    int jobs = 1;
};

struct GenerationRecord {
    std::size_t index = 0;
    ModelId model = ModelId::NeoHookean;
    std::vector<double> alpha;
    std::vector<double> theta;
    int valid_steps = 0;
    double wall_seconds = 0.0;
};

/// Fingerprint of one sweep point on a prebuilt mesh.
DatabaseEntry simulate_entry(const Mesh& mesh, const ExperimentDescriptor& desc, const SweepPoint& point,
                             const SolverOptions& options);

/// Simulates every point. Entry order equals point order whatever the
/// thread schedule; `on_done` (optional) is called once per entry from the
/// worker that produced it, under a lock. Throws MeshError if the mesh
/// cannot be built.
Database generate(const ExperimentDescriptor& desc, const std::vector<SweepPoint>& points,
                  const GenerationOptions& options, std::vector<GenerationRecord>* report = nullptr,
                  const std::function<void(const GenerationRecord&)>& on_done = {});

/// Normative text form: manifest lines, then one record per entry.
void write_database(std::ostream& out, const Database& db);
std::string serialize(const Database& db);
void save(const Database& db, const std::string& path);

/// Parses the text form. Throws ParseError naming the byte offset of the
/// problem, and ProtocolMismatchError if `expected` is given and its hash
/// differs from the file's descriptor.
Database parse_database(std::string_view text, const ExperimentDescriptor* expected = nullptr);
Database load(const std::string& path, const ExperimentDescriptor* expected = nullptr);

/// report.csv: index,model,alpha,theta,valid_steps,wall_seconds.
void write_generation_report(std::ostream& out, const std::vector<GenerationRecord>& report);

/// Space-separated values in 9-digit notation ("-" when empty).
std::string format_list(std::span<const double> values);

} // namespace mfp
