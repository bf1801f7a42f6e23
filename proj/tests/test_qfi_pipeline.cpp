#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "qprobe/qfi_pipeline.hpp"
#include "qprobe/rwa.hpp"

using namespace qprobe;

namespace {

ModelParams params(double delta, double coupling, double gamma) {
    ModelParams p;
    p.delta = delta;
    p.coupling_strength = coupling;
    p.gamma_env = gamma;
    return p;
}

const CouplingOperator kSigmaZ = coupling_operator(0.0, CouplingKind::PerpendicularZ);
const BlochVector kUp(0, 0, 1);

}  // namespace

TEST_CASE("engine names") {
    CHECK(parse_engine("heom") == Engine::Heom);
    CHECK(parse_engine("gbe") == Engine::Gbe);
    CHECK(parse_engine("rwa") == Engine::Rwa);
    CHECK(to_string(Engine::Gbe) == "gbe");
    CHECK_THROWS_AS(parse_engine("redfield"), ConfigError);
}

TEST_CASE("mixed coupling is HEOM-only") {
    const auto mixed = coupling_operator(0.5, CouplingKind::Mixed);
    CHECK(engine_supports(Engine::Heom, mixed));
    CHECK_FALSE(engine_supports(Engine::Gbe, mixed));
    CHECK_FALSE(engine_supports(Engine::Rwa, mixed));
    CHECK_THROWS_AS(propagate_engine(Engine::Gbe, params(1, 0.1, 1), mixed, {1.0, 0.1}, kUp), InvalidArgument);
}

TEST_CASE("pipeline reproduces the closed-form RWA QFI") {
    // 50 (t, Gamma, gamma) points, half of them with gamma < 2 Gamma
    testing::Generator gen(60);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double coupling = gen.log_uniform(0.01, 0.5);
        const double gamma = coupling * (i % 2 ? gen.uniform(0.05, 1.9) : gen.uniform(2.1, 20.0));
        const double t = gen.uniform(0.5, 60.0);
        const auto p = params(1.0, coupling, gamma);
        const auto curve = qfi_via_solver(Engine::Rwa, p, kSigmaZ, {t, t}, kUp);
        const double exact = rwa_qfi(t, p);
        if (exact < 1e-8 * t * t) continue;  // zero of G_t: relative error undefined
        worst = std::max(worst, std::abs(curve.samples.back().value - exact) / exact);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("unitary limit for every engine") {
    for (Engine e : {Engine::Rwa, Engine::Gbe, Engine::Heom}) {
        const auto curve = qfi_via_solver(e, params(1.0, 0.0, 1.0), kSigmaZ, {20.0, 0.5}, kUp);
        for (const auto& s : curve.samples) {
            CHECK(s.method == e);
            CHECK(s.epsilon == doctest::Approx(1e-5));
            CHECK(std::abs(s.value - s.t * s.t) <= 1e-6 * std::max(s.t * s.t, 1e-3));
        }
        CHECK(curve.warnings.empty());
    }
}

TEST_CASE("HEOM stencil runs share the discretisation of the central run") {
    const auto curve = qfi_via_solver(Engine::Heom, params(1.0, 0.1, 1.0), kSigmaZ, {10.0, 0.5}, kUp);
    REQUIRE(curve.central.depth.has_value());
    CHECK(*curve.central.depth <= 8);
    CHECK(curve.central.step_delta.value() < 1e-8);
    CHECK(curve.warnings.empty());
    // GBE and HEOM agree at weak Markovian coupling
    const auto gbe = qfi_via_solver(Engine::Gbe, params(1.0, 0.1, 1.0), kSigmaZ, {10.0, 0.5}, kUp);
    for (std::size_t i = 0; i < gbe.samples.size(); ++i)
        CHECK(gbe.samples[i].value == doctest::Approx(curve.samples[i].value).epsilon(0.05).scale(1.0));
}

TEST_CASE("tiny stencil steps trigger the noise warning") {
    QfiOptions opts;
    opts.relative_step = 2e-15;
    opts.engine.heom_depth = 6;
    const auto curve = qfi_via_solver(Engine::Heom, params(1.0, 0.1, 1.0), kSigmaZ, {5.0, 0.5}, kUp, opts);
    REQUIRE(curve.warnings.size() == 1);
    CHECK(curve.warnings[0].find("stencil noise") != std::string::npos);
}

TEST_CASE("parallel stencil evaluation is deterministic") {
    QfiOptions one, many;
    many.workers = 4;
    const auto p = params(0.7, 0.1, 0.3);
    const auto a = qfi_via_solver(Engine::Heom, p, kSigmaZ, {8.0, 0.5}, kUp, one);
    const auto b = qfi_via_solver(Engine::Heom, p, kSigmaZ, {8.0, 0.5}, kUp, many);
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].value == b.samples[i].value);
}

TEST_CASE("invalid stencil requests") {
    QfiOptions opts;
    opts.relative_step = 0.5;
    CHECK_THROWS_AS(qfi_via_solver(Engine::Rwa, params(1, 0.1, 1), kSigmaZ, {1.0, 0.5}, kUp, opts), InvalidArgument);
}

TEST_CASE("curve reductions") {
    const auto curve = qfi_via_solver(Engine::Rwa, params(1.0, 0.1, 1.0), kSigmaZ, {40.0, 0.1}, kUp);
    // F = t^2 G^2 peaks where d/dt (t G) = 0
    CHECK(curve.max_value() > 0.0);
    const double tm = curve.argmax_time();
    CHECK(rwa_qfi(tm, params(1.0, 0.1, 1.0)) == doctest::Approx(curve.max_value()).epsilon(1e-6));
    CHECK(rwa_qfi(tm + 0.1, params(1.0, 0.1, 1.0)) <= curve.max_value() * (1 + 1e-6));
}
