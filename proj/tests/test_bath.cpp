#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>

#include "generators.hpp"
#include "qprobe/bath.hpp"

using namespace qprobe;

namespace {

ModelParams params(double coupling, double gamma) {
    ModelParams p;
    p.coupling_strength = coupling;
    p.gamma_env = gamma;
    return p;
}

}  // namespace

TEST_CASE("correlation function values") {
    const auto p = params(0.1, 1.0);
    CHECK(ou_correlation(0.0, p) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(ou_correlation(1.0, p) == doctest::Approx(0.1 / (2 * std::exp(1.0))).epsilon(1e-15));
    CHECK(ou_correlation(800.0, p) < 1e-300);
    CHECK_THROWS_AS(ou_correlation(-1.0, p), InvalidArgument);
}

TEST_CASE("markovianity ratio") {
    CHECK(markovianity_ratio(params(0.1, 1.0)) == doctest::Approx(10.0));
    CHECK(markovianity_ratio(params(0.1, 0.02)) == doctest::Approx(0.2));
    CHECK(markovianity_ratio(params(0.3, 0.3)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(markovianity_ratio(params(0.0, 1.0)), InvalidArgument);
}

TEST_CASE("integrals agree with quadrature") {
    using boost::math::quadrature::exp_sinh;
    using boost::math::quadrature::gauss_kronrod;
    testing::Generator gen(3);
    for (int i = 0; i < 20; ++i) {
        const OuCorrelation a{gen.log_uniform(0.01, 1.0), gen.log_uniform(0.01, 10.0)};
        exp_sinh<double> integrator;
        const double total = integrator.integrate([&](double t) { return a(t); });
        CHECK(total == doctest::Approx(a.integral()).epsilon(1e-10));

        // Phi(t) = int_0^t (t - s) alpha(s) ds
        const double t = gen.uniform(0.01, 20.0);
        const double phi = gauss_kronrod<double, 61>::integrate([&](double s) { return (t - s) * a(s); }, 0.0, t,
                                                                 15, 1e-14);
        CHECK(phi == doctest::Approx(a.double_integral(t)).epsilon(1e-10));
    }
}

TEST_CASE("double integral at small times keeps relative accuracy") {
    const OuCorrelation a{0.1, 1.0};
    const double t = 1e-6;
    // Phi ~ alpha(0) t^2 / 2
    CHECK(a.double_integral(t) == doctest::Approx(0.05 * t * t / 2).epsilon(1e-6));
}

TEST_CASE("spectral density transforms back to the correlation") {
    using boost::math::quadrature::gauss_kronrod;
    const OuCorrelation a{0.2, 0.7};
    for (double t : {0.0, 0.5, 2.0}) {
        // alpha(t) = int J(w) cos(w t) dw over the real line; split off the slowly decaying tail.
        auto f = [&](double w) { return 2 * a.spectral_density(w) * std::cos(w * t); };
        const double body = gauss_kronrod<double, 61>::integrate(f, 0.0, 2000.0, 25, 1e-13);
        const double tail = t == 0.0 ? a.coupling * a.gamma * a.gamma / (2 * M_PI) * 2 / 2000.0 : 0.0;
        CHECK(body + tail == doctest::Approx(a(t)).epsilon(t == 0.0 ? 1e-6 : 1e-4));
    }
}

TEST_CASE("discretized bath") {
    CHECK_THROWS_AS(discretize_bath(params(0.1, 1.0), 1, 50.0), InvalidArgument);

    const auto zero = discretize_bath(params(0.0, 1.0), 11, 10.0);
    for (const auto& m : zero.modes) CHECK(m.weight == 0.0);
    CHECK(zero.reconstruction_error == 0.0);

    const auto bath = discretize_bath(params(0.1, 1.0), 2001, 50.0);
    CHECK(bath.size() == 2001);
    CHECK(bath.modes.front().frequency == doctest::Approx(-50.0));
    CHECK(bath.modes.back().frequency == doctest::Approx(50.0));
    // The truncated Lorentzian tail bounds the error from below by about 2 gamma / (pi W).
    CHECK(bath.reconstruction_error < 1.5e-2);
    CHECK(bath.reconstruction_error > 2.0 / (M_PI * 50.0) * 0.9);
    CHECK(std::abs(bath.correlation(0.3).imag()) < 1e-15);

    // Residual above tolerance is reported with K and W.
    try {
        discretize_bath(params(0.1, 1.0), 2001, 50.0, 1e-3);
        FAIL("expected a reconstruction error");
    } catch (const NumericalError& e) {
        const std::string what = e.what();
        CHECK(what.find("K = 2001") != std::string::npos);
        CHECK(what.find("W = 50") != std::string::npos);
    }
}

TEST_CASE("property: reconstruction error shrinks with the band limit") {
    double previous = 1.0;
    for (double w : {10.0, 20.0, 40.0, 80.0}) {
        const auto bath = discretize_bath(params(0.1, 1.0), static_cast<std::size_t>(40 * w) + 1, w, 1.0);
        CHECK(bath.reconstruction_error < previous);
        previous = bath.reconstruction_error;
    }
}
