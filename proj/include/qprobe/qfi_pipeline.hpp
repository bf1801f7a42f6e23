#pragma once

// F(Delta)(t) from any engine: propagate at Delta, Delta +- eps, Delta +- 2 eps
// with identical discretization, differentiate the Bloch vector with the
// five-point stencil and apply the Bloch-vector QFI formula.

#include <map>
#include <string>
#include <vector>

#include "qprobe/engine.hpp"

namespace qprobe {

struct QfiSample {
    double t;
    double value;
    Engine method;
    double epsilon;
};

struct QfiOptions {
    /// eps = relative_step * Delta.
    double relative_step = 1e-5;
    EngineSettings engine;
    int workers = 1;
};

struct QfiCurve {
    std::vector<QfiSample> samples;
    EngineRun central;  ///< the run at Delta itself, including the pinned HEOM settings
    std::vector<std::string> warnings;

    double max_value() const;
    double argmax_time() const;
};

/// Stencil runs after the first share the depth and step chosen at Delta.
/// Warns when the three-point and five-point estimates of F differ by more than 1%.
QfiCurve qfi_via_solver(Engine engine, const ModelParams& model, const CouplingOperator& coupling,
                        const TimeGrid& grid, const BlochVector& initial, const QfiOptions& options = {});

}  // namespace qprobe
