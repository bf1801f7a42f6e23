#include "qprobe/gbe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "format.hpp"

namespace qprobe {

LaplaceKernels kernel_laplace(std::complex<double> lambda, const ModelParams& params) {
    const double gamma = params.gamma_env;
    const double scale = 2.0 * params.coupling_strength * gamma;
    const std::complex<double> shifted = lambda + gamma;
    const std::complex<double> resonance = shifted * shifted + params.delta * params.delta;
    constexpr double eps = 1e-300;
    if (std::abs(shifted) < eps || std::abs(resonance) < eps) {
        throw InvalidArgument("kernel_laplace: lambda is a pole of the memory kernels");
    }
    return {scale * shifted / resonance, scale / shifted};
}

double relaxation_kernel(double t, const ModelParams& params) {
    return 2.0 * params.coupling_strength * params.gamma_env * std::exp(-params.gamma_env * t) *
           std::cos(params.delta * t);
}

double dephasing_kernel(double t, const ModelParams& params) {
    return 2.0 * params.coupling_strength * params.gamma_env * std::exp(-params.gamma_env * t);
}

std::complex<double> TransferMatrix::operator()(int i, int j, std::complex<double> lambda) const {
    if (i == 0 && j == 0) return xx(lambda);
    if (i == 1 && j == 1) return yy(lambda);
    if (i == 2 && j == 2) return zz(lambda);
    if (i == 1 && j == 2) return yz(lambda);
    if (i == 2 && j == 1) return zy(lambda);
    return 0.0;
}

TransferMatrix build_transfer_matrix(const ModelParams& params) {
    params.validate();
    const double d = params.delta;
    const double g = params.gamma_env;
    const double k = 2.0 * params.coupling_strength * g;  // 2 Gamma gamma

    TransferMatrix f;
    // F_xx = [lambda + A]^-1 = ((l+g)^2 + d^2) / (l((l+g)^2 + d^2) + k (l+g)).
    const Polynomial resonance{g * g + d * d, 2.0 * g, 1.0};
    f.xx.numerator = resonance;
    f.xx.denominator = Polynomial{0.0, 1.0} * resonance + Polynomial{k * g, k};

    // F_yy = [lambda + B + d^2/lambda]^-1 = l(l+g) / D,  D = l^2(l+g) + k l + d^2 (l+g).
    const Polynomial cubic{d * d * g, k + d * d, g, 1.0};
    f.yy = {Polynomial{0.0, g, 1.0}, cubic};
    // F_zz = lambda^-1 (lambda + B) F_yy = (l^2 + g l + k) / D.
    f.zz = {Polynomial{k, g, 1.0}, cubic};
    // F_yz = -F_zy = -d lambda^-1 F_yy = -d (l+g) / D.
    f.yz = {Polynomial{-d * g, -d}, cubic};
    f.zy = {Polynomial{d * g, d}, cubic};
    return f;
}

Vector3d GbeSolution::evaluate(const Vector3d& r0, double t) const {
    const std::complex<double> x = xx(t) * r0(0);
    const std::complex<double> y = yy(t) * r0(1) + yz(t) * r0(2);
    const std::complex<double> z = zy(t) * r0(1) + zz(t) * r0(2);
    const double imag = std::max({std::abs(x.imag()), std::abs(y.imag()), std::abs(z.imag())});
    if (imag > 1e-9) {
        std::ostringstream msg;
        msg << "GBE reconstruction has imaginary residue " << imag << " at t = " << t;
        throw NumericalError(msg.str());
    }
    return {x.real(), y.real(), z.real()};
}

double GbeSolution::max_real_pole() const {
    return std::max({xx.max_real_pole(), yy.max_real_pole(), zz.max_real_pole(), yz.max_real_pole(),
                     zy.max_real_pole()});
}

GbeSolution solve_gbe(const ModelParams& params) {
    const TransferMatrix f = build_transfer_matrix(params);
    GbeSolution s{inverse_laplace(f.xx), inverse_laplace(f.yy), inverse_laplace(f.zz), inverse_laplace(f.yz),
                  inverse_laplace(f.zy)};
    if (s.max_real_pole() > 1e-12) {
        std::ostringstream msg;
        msg << "GBE transfer matrix has an unstable pole, Re = " << s.max_real_pole();
        throw NumericalError(msg.str());
    }
    return s;
}

Trajectory<BlochVector> gbe_propagate(const BlochVector& r0, const TimeGrid& grid, const ModelParams& params) {
    const GbeSolution sol = solve_gbe(params);
    Trajectory<BlochVector> traj;
    traj.times = grid.points();
    traj.states.reserve(traj.times.size());
    double overshoot = 0.0;
    for (double t : traj.times) {
        Vector3d r = sol.evaluate(r0.vector(), t);
        // Born dynamics are not guaranteed to stay inside the Bloch ball; clip
        // rounding-level excursions and reject genuine ones.
        const double n = r.norm();
        if (n > 1.0) {
            overshoot = std::max(overshoot, n - 1.0);
            if (n - 1.0 > 1e-6) throw NumericalError("GBE trajectory left the Bloch ball");
            r /= n;
        }
        traj.states.emplace_back(r);
    }
    traj.metadata["engine"] = "gbe";
    traj.metadata["max_real_pole"] = detail::number(sol.max_real_pole());
    traj.metadata["bloch_overshoot"] = detail::number(overshoot);
    return traj;
}

}  // namespace qprobe
