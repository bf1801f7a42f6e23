#include "qprobe/engine.hpp"

#include <sstream>

#include "format.hpp"
#include "qprobe/gbe.hpp"
#include "qprobe/rwa.hpp"

namespace qprobe {

namespace {

// Largest |r| - 1 accepted from a truncated hierarchy; rescaled onto the sphere.
constexpr double kHeomOvershootLimit = 1e-6;

Trajectory<BlochVector> heom_bloch(const Trajectory<DensityMatrix>& in) {
    Trajectory<BlochVector> out;
    out.times = in.times;
    out.metadata = in.metadata;
    out.states.reserve(in.size());
    double overshoot = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        Vector3d r = bloch_components(in.states[i].matrix());
        const double excess = r.norm() - 1.0;
        if (excess > kHeomOvershootLimit) {
            std::ostringstream msg;
            msg << "HEOM Bloch vector leaves the unit ball by " << excess << " at t = " << in.times[i];
            throw NumericalError(msg.str());
        }
        if (excess > 0.0) {
            overshoot = std::max(overshoot, excess);
            r /= r.norm();
        }
        out.states.emplace_back(r);
    }
    out.metadata["bloch_overshoot"] = detail::number(overshoot);
    return out;
}

}  // namespace

std::string to_string(Engine engine) {
    switch (engine) {
        case Engine::Heom: return "heom";
        case Engine::Gbe: return "gbe";
        case Engine::Rwa: return "rwa";
    }
    return "unknown";
}

Engine parse_engine(std::string_view name) {
    if (name == "heom") return Engine::Heom;
    if (name == "gbe") return Engine::Gbe;
    if (name == "rwa") return Engine::Rwa;
    throw ConfigError("unknown engine '" + std::string(name) + "' (expected heom, gbe or rwa)");
}

bool engine_supports(Engine engine, const CouplingOperator& coupling) {
    return engine == Engine::Heom || coupling.kind == CouplingKind::PerpendicularZ;
}

EngineRun propagate_engine(Engine engine, const ModelParams& model, const CouplingOperator& coupling,
                           const TimeGrid& grid, const BlochVector& initial, const EngineSettings& settings) {
    if (!engine_supports(engine, coupling)) {
        throw InvalidArgument(to_string(engine) + " is only defined for the sigma_z coupling");
    }
    EngineRun run;
    switch (engine) {
        case Engine::Gbe:
            run.trajectory = gbe_propagate(initial, grid, model);
            break;
        case Engine::Rwa:
            run.trajectory = rwa_propagate(initial, grid, model);
            break;
        case Engine::Heom: {
            HeomConfig cfg;
            cfg.model = model;
            cfg.coupling = coupling;
            cfg.grid = grid;
            cfg.initial = density_from_bloch(initial);
            cfg.storage = settings.storage;
            cfg.step = settings.heom_step;
            if (settings.heom_depth) {
                cfg.depth = *settings.heom_depth;
                run.trajectory = heom_bloch(heom_propagate(cfg));
                run.depth = cfg.depth;
                run.step = cfg.step.value_or(default_heom_step(model, grid.step));
            } else {
                ConvergedHeom c = heom_converged_propagate(cfg, settings.convergence);
                run.trajectory = heom_bloch(c.trajectory);
                run.depth = c.depth;
                run.step = c.step;
                run.depth_delta = c.depth_delta;
                run.step_delta = c.step_delta;
            }
            break;
        }
    }
    return run;
}

}  // namespace qprobe
