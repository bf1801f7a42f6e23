#pragma once

// Uniform entry point over the three dynamics engines.

#include <optional>
#include <string>
#include <string_view>

#include "qprobe/heom.hpp"
#include "qprobe/types.hpp"

namespace qprobe {

enum class Engine { Heom, Gbe, Rwa };

std::string to_string(Engine engine);
/// Accepts "heom", "gbe", "rwa"; throws ConfigError otherwise.
Engine parse_engine(std::string_view name);

/// GBE and RWA are derived for S = sigma_z only.
bool engine_supports(Engine engine, const CouplingOperator& coupling);

struct EngineSettings {
    /// Pinning the depth disables the convergence search.
    std::optional<int> heom_depth;
    /// Initial (or, with a pinned depth, fixed) RK4 step.
    std::optional<double> heom_step;
    ConvergenceOptions convergence;
    AdoStorage storage = AdoStorage::Symmetric;
};

struct EngineRun {
    Trajectory<BlochVector> trajectory;
    /// HEOM only: depth and step actually used, and the convergence deltas when searched.
    std::optional<int> depth;
    std::optional<double> step;
    std::optional<double> depth_delta;
    std::optional<double> step_delta;
};

EngineRun propagate_engine(Engine engine, const ModelParams& model, const CouplingOperator& coupling,
                           const TimeGrid& grid, const BlochVector& initial, const EngineSettings& settings = {});

}  // namespace qprobe
