#pragma once

// Built-in parameter sets for the published figures and their qualitative checks.

#include <string>
#include <vector>

#include "qprobe/experiment.hpp"

namespace qprobe {

struct CheckResult {
    std::string description;
    bool passed = false;
    std::string detail;
};

struct FigureReport {
    std::string id;
    RunReport run;
    std::vector<CheckResult> checks;

    bool all_passed() const;
};

/// fig1a ... fig1d, fig2a, fig2b, fig2c, fig3ab, fig3cd.
const std::vector<std::string>& figure_ids();

/// Preset configuration document; throws ConfigError listing the valid ids.
nlohmann::ordered_json figure_preset(const std::string& id);

/// Runs the preset (overrides applied on top) and evaluates its checks.
FigureReport reproduce_figure(const std::string& id, const RunOptions& options,
                              const std::vector<std::string>& overrides = {});

// Curve diagnostics used by the checks.

/// max_t |a_z - b_z|.
double sup_deviation_z(const Trajectory<BlochVector>& a, const Trajectory<BlochVector>& b);
/// ||a_z - b_z||_2 / ||a_z||_2 over the grid.
double relative_rms_z(const Trajectory<BlochVector>& reference, const Trajectory<BlochVector>& other);
/// Indices of strict interior local maxima.
std::vector<std::size_t> local_maxima(const std::vector<double>& values);
/// At least two interior maxima with a minimum below `depth` * max between a pair of them.
bool has_collapse_and_revival(const std::vector<double>& values, double depth = 0.05);

}  // namespace qprobe
