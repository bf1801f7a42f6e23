#pragma once

// Configuration-driven experiments: config parsing and validation, single runs,
// parameter sweeps and CSV/JSON serialization.

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qprobe/qfi_pipeline.hpp"

namespace qprobe {

enum class Observable { Trajectory, Qfi };

struct SweepAxes {
    std::vector<double> gamma_ratio;
    std::vector<double> chi;

    bool empty() const { return gamma_ratio.empty() && chi.empty(); }
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<Engine> engines{Engine::Heom};
    Observable observable = Observable::Trajectory;
    ModelParams model;
    CouplingKind coupling = CouplingKind::PerpendicularZ;
    BlochVector initial{0.0, 0.0, 1.0};
    TimeGrid grid{50.0, 0.1};
    EngineSettings solver;
    double epsilon_rel = 1e-5;
    SweepAxes sweep;
    /// The configuration as read, after overrides; echoed into the metadata.
    nlohmann::ordered_json source;

    CouplingOperator coupling_operator() const;
};

/// Builds a config from JSON.  Accepted keys:
///   name, engines, observable (trajectory|qfi), delta, coupling_strength,
///   gamma | gamma_ratio, coupling (sigma_z|mixed), chi,
///   initial_state (sz_up|sz_down|plus|minus|[x, y, z]), t_max, dt,
///   heom_depth, heom_step, epsilon_rel, depth_tolerance, step_tolerance,
///   depth_max, sweep {gamma_ratio: [...], chi: [...]}.
/// Unknown keys and invalid values throw ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc);

/// Applies "key=value" overrides (dotted keys reach into objects, values parse
/// as JSON and fall back to plain strings).
void apply_overrides(nlohmann::ordered_json& doc, const std::vector<std::string>& overrides);

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

struct RunOptions {
    std::filesystem::path out_dir = "results";
    int workers = 1;
    bool emit_plotscript = false;
    std::string command = "run";
};

struct CellResult {
    double gamma_ratio = 0.0;
    double chi = 0.0;
    std::optional<QfiCurve> curve;  ///< empty when the cell failed
    std::string error;
};

struct EngineResult {
    Engine engine;
    std::optional<EngineRun> trajectory;  ///< Observable::Trajectory
    std::optional<QfiCurve> qfi;          ///< Observable::Qfi without sweep axes
    std::vector<CellResult> cells;        ///< sweeps
};

struct RunReport {
    std::vector<EngineResult> results;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// Runs every engine of the config; sweeps when axes are present.  A failing
/// single run removes the files it wrote and rethrows; failing sweep cells are
/// recorded and skipped.  Throws NumericalError when every sweep cell failed.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Strict sweep entry point: requires at least one axis and observable qfi.
RunReport run_sweep(const ExperimentConfig& config, const RunOptions& options);

/// 15 significant digits, scientific notation.
std::string format_number(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory<BlochVector>& traj);
void write_qfi_csv(std::ostream& os, const QfiCurve& curve);

}  // namespace qprobe
