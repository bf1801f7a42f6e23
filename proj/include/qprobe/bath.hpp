#pragma once

// Zero-temperature Ornstein-Uhlenbeck environment: alpha(t) = Gamma gamma exp(-gamma t) / 2.

#include <complex>
#include <cstddef>
#include <vector>

#include "qprobe/types.hpp"

namespace qprobe {

struct OuCorrelation {
    double coupling;  ///< Gamma
    double gamma;     ///< inverse memory time

    static OuCorrelation from(const ModelParams& p) { return {p.coupling_strength, p.gamma_env}; }

    double operator()(double t) const;

    /// int_0^inf alpha(t) dt = Gamma / 2.
    double integral() const { return 0.5 * coupling; }

    /// Phi(t) = int_0^t dt1 int_0^t1 dt2 alpha(t1 - t2).
    double double_integral(double t) const;

    /// Lorentzian spectral density J(w) = (Gamma gamma^2 / 2 pi) / (w^2 + gamma^2),
    /// whose Fourier transform over the whole real line is alpha(|t|).
    double spectral_density(double omega) const;
};

/// alpha(t) for t >= 0.  Negative t is rejected; the correlation is one-sided here.
double ou_correlation(double t, const ModelParams& params);

/// gamma / Gamma.  Large values are Markovian, small values carry memory.
double markovianity_ratio(const ModelParams& params);

struct BathMode {
    double frequency;
    double weight;  ///< g_k^2
};

/// Finite set of modes approximating alpha(t) = sum_k g_k^2 exp(-i w_k t).
struct DiscretizedBath {
    std::vector<BathMode> modes;
    double band_limit = 0.0;
    /// sup_{t in [0, 5/gamma]} |sum_k g_k^2 e^{-i w_k t} - alpha(t)| / alpha(0); zero when Gamma = 0.
    double reconstruction_error = 0.0;

    std::size_t size() const { return modes.size(); }
    std::complex<double> correlation(double t) const;
};

/// Default relative reconstruction tolerance for discretize_bath.  A uniform grid
/// truncated at |w| = W misses the Lorentzian tail, which alone costs about
/// 2 gamma / (pi W) of alpha(0); 2e-2 admits the W = 50 gamma oracle default.
inline constexpr double kBathReconstructionTolerance = 2e-2;

/// Uniform grid of `count` frequencies on [-W, W], weights J(w_k) dw.
/// Throws NumericalError naming K and W when the relative reconstruction
/// error exceeds `tolerance`.
DiscretizedBath discretize_bath(const ModelParams& params, std::size_t count, double band_limit,
                                double tolerance = kBathReconstructionTolerance);

}  // namespace qprobe
