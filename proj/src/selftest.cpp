#include "qprobe/selftest.hpp"

#include <cmath>
#include <sstream>

#include "qprobe/bath.hpp"
#include "qprobe/oracles.hpp"
#include "qprobe/parallel.hpp"
#include "qprobe/qfi_pipeline.hpp"
#include "qprobe/rwa.hpp"

namespace qprobe {

namespace {

ModelParams params(double delta, double coupling, double gamma) {
    ModelParams p;
    p.delta = delta;
    p.coupling_strength = coupling;
    p.gamma_env = gamma;
    return p;
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

CheckResult bounded(std::string description, double value, double bound) {
    return {std::move(description) + " < " + sci(bound), value < bound, "deviation " + sci(value)};
}

CheckResult rwa_pipeline() {
    const ModelParams p = params(1.0, 0.1, 0.05);
    const auto curve = qfi_via_solver(Engine::Rwa, p, coupling_operator(0.0, CouplingKind::PerpendicularZ),
                                      {5.0, 0.5}, BlochVector(0, 0, 1));
    double worst = 0.0;
    for (const auto& s : curve.samples) {
        if (s.t == 0.0) continue;
        const double exact = rwa_qfi(s.t, p);
        worst = std::max(worst, std::abs(s.value - exact) / exact);
    }
    return bounded("RWA finite-difference QFI vs t^2 G^2, relative", worst, 1e-6);
}

CheckResult heom_dephasing() {
    const double coupling = 0.1, gamma = 1.0;
    const auto run = propagate_engine(Engine::Heom, params(1.0, coupling, gamma),
                                      coupling_operator(0.0, CouplingKind::Mixed), {30.0, 0.5}, BlochVector(0, 0, 1));
    double worst = 0.0;
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
        const auto& r = run.trajectory.states[i];
        worst = std::max(worst, std::abs(std::hypot(r.y(), r.z()) -
                                         dephasing_coherence(run.trajectory.times[i], coupling, gamma)));
    }
    return bounded("HEOM pure-dephasing coherence vs closed form", worst, 1e-4);
}

CheckResult few_mode_dephasing() {
    const double coupling = 0.1, gamma = 1.0;
    const auto bath = discretize_bath(params(1.0, coupling, gamma), 41, 10.0 * gamma, 0.1);
    FewModeOptions opts;
    opts.occupation_cap = 2;
    const auto out = few_mode_schrodinger(bath, coupling_operator(0.0, CouplingKind::Mixed),
                                          params(1.0, coupling, gamma), {2.0 / gamma, 0.1}, Vector2cd(1, 0), opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.reduced.size(); ++i) {
        const Vector3d r = bloch_components(out.reduced.states[i].matrix());
        worst = std::max(worst, std::abs(std::hypot(r(1), r(2)) -
                                         dephasing_coherence(out.reduced.times[i], coupling, gamma)));
    }
    return bounded("few-mode Schroedinger dephasing vs closed form on [0, 2/gamma]", worst, 1e-3);
}

CheckResult few_mode_rotating_wave() {
    const double coupling = 0.1, gamma = 1.0, delta = 1.0;
    DiscretizedBath bath = discretize_bath(params(delta, coupling, gamma), 200, 50.0 * gamma);
    for (auto& m : bath.modes) m.frequency += delta;
    FewModeOptions opts;
    opts.coupling = FewModeCoupling::RotatingWave;
    const auto out = few_mode_schrodinger(bath, coupling_operator(0.0, CouplingKind::PerpendicularZ),
                                          params(delta, coupling, gamma), {5.0 / gamma, 0.25}, pauli::plus(), opts);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.survival.size(); ++i) {
        const double t = out.reduced.times[i];
        const std::complex<double> rotated = out.survival[i] * std::exp(std::complex<double>(0, delta * t / 2));
        worst = std::max(worst, std::abs(rotated - decay_factor(t, coupling, gamma)));
    }
    return bounded("few-mode rotating-wave survival amplitude vs G_t", worst, 1e-3);
}

// gamma / Gamma = 1000 leaves a memory correction of order Gamma Delta / gamma well below the bound.
CheckResult markov_limit(Engine engine) {
    const double coupling = 0.05, gamma = 50.0;
    const TimeGrid grid{10.0, 0.1};
    const auto run = propagate_engine(engine, params(1.0, coupling, gamma),
                                      coupling_operator(0.0, CouplingKind::PerpendicularZ), grid, BlochVector(0, 0, 1));
    const auto reference = lindblad_propagate(BlochVector(0, 0, 1), grid, 1.0, coupling);
    return bounded(to_string(engine) + " vs Lindblad at gamma/Gamma = 1000", sup_distance(run.trajectory, reference),
                   1e-2);
}

CheckResult unitary_limit(Engine engine) {
    const auto curve = qfi_via_solver(engine, params(1.0, 0.0, 1.0),
                                      coupling_operator(0.0, CouplingKind::PerpendicularZ), {20.0, 0.5},
                                      BlochVector(0, 0, 1));
    double worst = 0.0;
    for (const auto& s : curve.samples)
        if (s.t > 0) worst = std::max(worst, std::abs(s.value - s.t * s.t) / (s.t * s.t));
    return bounded(to_string(engine) + " QFI at Gamma = 0 vs t^2, relative", worst, 1e-6);
}

}  // namespace

std::vector<CheckResult> run_selftest(int workers) {
    using Check = CheckResult (*)();
    const std::vector<Check> checks{
        rwa_pipeline,
        heom_dephasing,
        few_mode_dephasing,
        few_mode_rotating_wave,
        [] { return markov_limit(Engine::Heom); },
        [] { return markov_limit(Engine::Gbe); },
        [] { return unitary_limit(Engine::Heom); },
        [] { return unitary_limit(Engine::Gbe); },
        [] { return unitary_limit(Engine::Rwa); },
    };
    std::vector<CheckResult> out(checks.size());
    parallel_for(checks.size(), workers, [&](std::size_t i) {
        try {
            out[i] = checks[i]();
        } catch (const std::exception& e) {
            out[i] = {"check " + std::to_string(i + 1), false, std::string("error: ") + e.what()};
        }
    });
    return out;
}

}  // namespace qprobe
