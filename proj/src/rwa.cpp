#include "qprobe/rwa.hpp"

namespace qprobe {

DensityMatrix rwa_state(double t, const DensityMatrix& rho0, const ModelParams& params) {
    params.validate();
    const double g = decay_factor(t, params.coupling_strength, params.gamma_env);
    const Matrix2cd in = pauli::to_sigma_x_basis(rho0.matrix());
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -params.delta * t));

    Matrix2cd out;
    out(0, 0) = in(0, 0).real() * g * g;
    out(0, 1) = in(0, 1) * g * phase;
    out(1, 0) = std::conj(out(0, 1));
    out(1, 1) = 1.0 - out(0, 0).real();
    return DensityMatrix::from_matrix(pauli::from_sigma_x_basis(out), kSolverTolerance);
}

Trajectory<BlochVector> rwa_propagate(const BlochVector& r0, const TimeGrid& grid, const ModelParams& params) {
    params.validate();
    Trajectory<BlochVector> traj;
    traj.times = grid.points();
    traj.states.reserve(traj.times.size());
    // Bloch form of rwa_state: x relaxes through G^2, (y, z) precess about x and shrink by G.
    // Working on components directly avoids the cancellation in 1/2 +- small populations.
    for (double t : traj.times) {
        const double g = decay_factor(t, params.coupling_strength, params.gamma_env);
        const double c = std::cos(params.delta * t), s = std::sin(params.delta * t);
        traj.states.emplace_back((1.0 + r0.x()) * g * g - 1.0, g * (r0.y() * c - r0.z() * s),
                                 g * (r0.z() * c + r0.y() * s));
    }
    traj.metadata["engine"] = "rwa";
    return traj;
}

double rwa_qfi(double t, const ModelParams& params) {
    params.validate();
    const double g = decay_factor(t, params.coupling_strength, params.gamma_env);
    return t * t * g * g;
}

}  // namespace qprobe
