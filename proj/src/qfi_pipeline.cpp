#include "qprobe/qfi_pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "qprobe/parallel.hpp"
#include "qprobe/qfi.hpp"

namespace qprobe {

namespace {

// Points with F below this fraction of the curve maximum are excluded from the
// stencil-noise warning; their relative error is meaningless.
constexpr double kNoiseFloor = 1e-6;
constexpr double kStencilDisagreement = 0.01;

}  // namespace

double QfiCurve::max_value() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.value);
    return m;
}

double QfiCurve::argmax_time() const {
    if (samples.empty()) throw InvalidArgument("empty QFI curve");
    auto it = std::max_element(samples.begin(), samples.end(),
                               [](const QfiSample& a, const QfiSample& b) { return a.value < b.value; });
    return it->t;
}

QfiCurve qfi_via_solver(Engine engine, const ModelParams& model, const CouplingOperator& coupling,
                        const TimeGrid& grid, const BlochVector& initial, const QfiOptions& options) {
    model.validate();
    if (!(options.relative_step > 0) || options.relative_step > 0.1) {
        throw InvalidArgument("relative stencil step must lie in (0, 0.1]");
    }
    const double eps = options.relative_step * model.delta;
    if (model.delta - 2 * eps <= 0) throw InvalidArgument("stencil reaches non-positive Delta");

    QfiCurve curve;
    curve.central = propagate_engine(engine, model, coupling, grid, initial, options.engine);

    EngineSettings pinned = options.engine;
    if (engine == Engine::Heom) {
        pinned.heom_depth = curve.central.depth;
        pinned.heom_step = curve.central.step;
    }

    constexpr std::array<double, 4> offsets{2.0, 1.0, -1.0, -2.0};
    std::array<Trajectory<BlochVector>, 4> shifted;
    parallel_for(offsets.size(), options.workers, [&](std::size_t i) {
        shifted[i] = propagate_engine(engine, model.with_delta(model.delta + offsets[i] * eps), coupling, grid,
                                      initial, pinned)
                         .trajectory;
    });

    const auto& central = curve.central.trajectory;
    curve.samples.reserve(central.size());
    std::vector<double> three_point;
    three_point.reserve(central.size());
    for (std::size_t k = 0; k < central.size(); ++k) {
        const Vector3d& r = central.states[k].vector();
        const Vector3d dr = stencil_combine<Vector3d>(shifted[0].states[k].vector(), shifted[1].states[k].vector(),
                                                      shifted[2].states[k].vector(),
                                                      shifted[3].states[k].vector(), eps);
        const Vector3d dr3 = (shifted[1].states[k].vector() - shifted[2].states[k].vector()) / (2 * eps);
        curve.samples.push_back({central.times[k], qfi_bloch(r, dr), engine, eps});
        three_point.push_back(qfi_bloch(r, dr3));
    }

    const double floor = kNoiseFloor * curve.max_value();
    std::size_t noisy = 0;
    double first_noisy = 0.0;
    for (std::size_t k = 0; k < curve.samples.size(); ++k) {
        const double f5 = curve.samples[k].value;
        if (f5 <= floor) continue;
        if (std::abs(f5 - three_point[k]) > kStencilDisagreement * f5) {
            if (noisy++ == 0) first_noisy = curve.samples[k].t;
        }
    }
    if (noisy > 0) {
        std::ostringstream msg;
        msg << "stencil noise: 3-point and 5-point F differ by more than 1% at " << noisy << " of "
            << curve.samples.size() << " times (first at t = " << first_noisy << ", eps = " << eps << ")";
        curve.warnings.push_back(msg.str());
    }
    return curve;
}

}  // namespace qprobe
