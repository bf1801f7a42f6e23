#pragma once

// Reference solutions used for validation only.  None of them shares an
// integrator with the engines.

#include <complex>
#include <cstddef>
#include <vector>

#include "qprobe/bath.hpp"
#include "qprobe/types.hpp"

namespace qprobe {

/// Markov-limit master equation for S = sigma_z,
///   d rho/dt = -i[Delta sigma_x / 2, rho] + Gamma (sigma_z rho sigma_z - rho),
/// solved as the matrix exponential of the 3x3 Bloch generator.
Trajectory<BlochVector> lindblad_propagate(const BlochVector& r0, const TimeGrid& grid, double delta,
                                           double coupling);

/// |rho_+-(t) / rho_+-(0)| = exp(-2 Gamma (t - (1 - e^{-gamma t}) / gamma)) for [S, H_s] = 0.
double dephasing_coherence(double t, double coupling, double gamma);

enum class FewModeCoupling {
    Full,          ///< S (x) sum_k g_k (b_k + b_k^dagger)
    RotatingWave,  ///< sum_k g_k (sigma_+ b_k + sigma_- b_k^dagger) with sigma_+ = |+><-|; requires S = sigma_z
};

struct FewModeOptions {
    /// Largest total number of bath excitations kept.
    int occupation_cap = 1;
    FewModeCoupling coupling = FewModeCoupling::Full;
    /// Refuse to diagonalize beyond this Hilbert-space dimension.
    std::size_t max_dimension = 4000;
};

struct FewModeResult {
    Trajectory<DensityMatrix> reduced;
    /// <Psi(0)|Psi(t)> on the grid.
    std::vector<std::complex<double>> survival;
    std::size_t dimension = 0;
    /// max_t | |Psi(t)|^2 - 1 |.
    double norm_drift = 0.0;
    /// 2 pi / (mode spacing); results beyond it show finite-size revivals.
    double recurrence_time = 0.0;
};

/// Exact unitary evolution of the probe and the discretized modes from
/// psi0 (x) vacuum, by dense diagonalization of the real symmetric Hamiltonian
/// H_s + sum_k w_k b_k^dagger b_k + H_i.  The mode frequencies are taken from `bath`
/// as given; the rotating-wave variant expects them shifted to the probe resonance.
FewModeResult few_mode_schrodinger(const DiscretizedBath& bath, const CouplingOperator& coupling,
                                   const ModelParams& model, const TimeGrid& grid, const Vector2cd& psi0,
                                   const FewModeOptions& options = {});

}  // namespace qprobe
