#include "qprobe/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qprobe {

double OuCorrelation::operator()(double t) const {
    if (t < 0) throw InvalidArgument("ou_correlation: negative time");
    return 0.5 * coupling * gamma * std::exp(-gamma * t);
}

double OuCorrelation::double_integral(double t) const {
    if (t < 0) throw InvalidArgument("double_integral: negative time");
    // Phi = (Gamma / 2 gamma) (x - 1 + e^{-x}) with x = gamma t; series where that cancels.
    const double x = gamma * t;
    const double bracket =
        x < 1e-3 ? x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0))) : x + std::expm1(-x);
    return 0.5 * coupling * bracket / gamma;
}

double OuCorrelation::spectral_density(double omega) const {
    return coupling * gamma * gamma / (2.0 * std::numbers::pi) / (omega * omega + gamma * gamma);
}

double ou_correlation(double t, const ModelParams& params) { return OuCorrelation::from(params)(t); }

double markovianity_ratio(const ModelParams& params) {
    if (params.coupling_strength == 0.0) throw InvalidArgument("markovianity_ratio: Gamma = 0");
    return params.gamma_env / params.coupling_strength;
}

std::complex<double> DiscretizedBath::correlation(double t) const {
    std::complex<double> sum = 0.0;
    for (const auto& m : modes) sum += m.weight * std::exp(std::complex<double>(0.0, -m.frequency * t));
    return sum;
}

DiscretizedBath discretize_bath(const ModelParams& params, std::size_t count, double band_limit,
                                double tolerance) {
    if (count < 2) throw InvalidArgument("discretize_bath: need at least two modes");
    if (!(band_limit > 0)) throw InvalidArgument("discretize_bath: band limit must be positive");
    const OuCorrelation alpha = OuCorrelation::from(params);

    DiscretizedBath bath;
    bath.band_limit = band_limit;
    bath.modes.reserve(count);
    const double dw = 2.0 * band_limit / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        const double w = -band_limit + dw * static_cast<double>(k);
        bath.modes.push_back({w, alpha.spectral_density(w) * dw});
    }

    const double a0 = alpha(0.0);
    if (a0 > 0) {
        constexpr int samples = 501;
        const double t_end = 5.0 / alpha.gamma;
        double err = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double t = t_end * i / (samples - 1);
            err = std::max(err, std::abs(bath.correlation(t) - alpha(t)));
        }
        bath.reconstruction_error = err / a0;
    }
    if (bath.reconstruction_error > tolerance) {
        std::ostringstream msg;
        msg << "discretize_bath: relative reconstruction error " << bath.reconstruction_error
            << " exceeds " << tolerance << " for K = " << count << ", W = " << band_limit
            << "; widen W for the tail or raise K for aliasing";
        throw NumericalError(msg.str());
    }
    return bath;
}

}  // namespace qprobe
