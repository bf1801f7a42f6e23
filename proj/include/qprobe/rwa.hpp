#pragma once

// Rotating-wave reduced dynamics for the perpendicular coupling.  In the
// {|+>, |->} basis the state evolves as
//   rho_++(t) = rho_++(0) G_t^2,   rho_+-(t) = rho_+-(0) G_t e^{-i Delta t},
// with the decay factor
//   G_t = e^{-gamma t/2} [cosh(Omega t/2) + (gamma/Omega) sinh(Omega t/2)],
//   Omega = sqrt(gamma^2 - 2 gamma Gamma)   (imaginary when gamma < 2 Gamma).

#include <cmath>
#include <complex>

#include "qprobe/types.hpp"

namespace qprobe {

/// G_t, evaluated in complex arithmetic so the oscillatory regime needs no branch.
template <typename Scalar>
Scalar decay_factor(Scalar t, Scalar coupling, Scalar gamma) {
    using std::abs;
    using std::exp;
    using std::real;
    using C = std::complex<Scalar>;
    if (t < Scalar(0)) throw InvalidArgument("decay_factor: negative time");
    if (!(gamma > Scalar(0))) throw InvalidArgument("decay_factor: gamma must be positive");
    if (coupling < Scalar(0)) throw InvalidArgument("decay_factor: Gamma must be non-negative");

    const C omega = std::sqrt(C(gamma * gamma - Scalar(2) * gamma * coupling));
    const C x = omega * t / Scalar(2);
    const Scalar damping = exp(-gamma * t / Scalar(2));
    if (abs(omega * t) < Scalar(1e-6)) {
        // cosh x + (gamma t/2) sinh(x)/x to O(x^4).
        const C x2 = x * x;
        const C bracket = Scalar(1) + x2 / Scalar(2) + gamma * t / Scalar(2) * (Scalar(1) + x2 / Scalar(6));
        return damping * real(bracket);
    }
    if (real(x) > Scalar(30)) {
        // Exponential form avoids cosh overflow at long times.
        const C ratio = C(gamma) / omega;
        const C g = (Scalar(1) + ratio) * std::exp(x - gamma * t / Scalar(2)) +
                    (Scalar(1) - ratio) * std::exp(-x - gamma * t / Scalar(2));
        return real(g) / Scalar(2);
    }
    return damping * real(std::cosh(x) + C(gamma) / omega * std::sinh(x));
}

/// Reduced state at time t from rho0.  Delta only enters through the coherence phase.
DensityMatrix rwa_state(double t, const DensityMatrix& rho0, const ModelParams& params);

/// Bloch trajectory of rwa_state on a grid, evaluated component-wise.
Trajectory<BlochVector> rwa_propagate(const BlochVector& r0, const TimeGrid& grid, const ModelParams& params);

/// F(Delta) = t^2 G_t^2 for the initial state (|+> + |->)/sqrt(2).
double rwa_qfi(double t, const ModelParams& params);

}  // namespace qprobe
