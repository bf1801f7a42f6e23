#pragma once

// Born-approximated generalized Bloch equation for S = sigma_z:
//
//   d<sigma>/dt = T(t) (*) <sigma>,
//   T = [[-A, 0, 0], [0, -B, -Delta delta(t)], [0, Delta delta(t), 0]],
//   A(t) = 4 cos(Delta t) alpha(t),  B(t) = 4 alpha(t),
//
// solved through its Laplace-domain transfer matrix and inverted exactly by
// residues of rational functions.

#include <complex>

#include "qprobe/polynomial.hpp"
#include "qprobe/types.hpp"

namespace qprobe {

struct LaplaceKernels {
    std::complex<double> relaxation;  ///< Laplace transform of A(t)
    std::complex<double> dephasing;   ///< Laplace transform of B(t)
};

/// A(lambda) = 2 Gamma gamma (lambda + gamma) / ((lambda + gamma)^2 + Delta^2),
/// B(lambda) = 2 Gamma gamma / (lambda + gamma).  Throws InvalidArgument at a pole.
LaplaceKernels kernel_laplace(std::complex<double> lambda, const ModelParams& params);

/// Time-domain kernels A(t), B(t).
double relaxation_kernel(double t, const ModelParams& params);
double dephasing_kernel(double t, const ModelParams& params);

/// Non-vanishing transfer-matrix entries as rational functions of lambda.
/// After cancelling the common factors every denominator is a cubic.
struct TransferMatrix {
    RationalFunction xx, yy, zz, yz, zy;

    /// Entry (i, j) with i, j in {0, 1, 2} for {x, y, z}; zero entries return 0.
    std::complex<double> operator()(int i, int j, std::complex<double> lambda) const;
};

TransferMatrix build_transfer_matrix(const ModelParams& params);

/// Residue expansions of every transfer entry; evaluate() maps r0 to r(t).
struct GbeSolution {
    ResidueExpansion xx, yy, zz, yz, zy;

    Vector3d evaluate(const Vector3d& r0, double t) const;
    /// Largest real part over all poles; non-positive for a stable solution.
    double max_real_pole() const;
};

/// Throws NumericalError if any pole has a positive real part beyond 1e-12.
GbeSolution solve_gbe(const ModelParams& params);

/// Bloch trajectory on the grid.  Components carry an imaginary residue below
/// 1e-9 which is checked and discarded.
Trajectory<BlochVector> gbe_propagate(const BlochVector& r0, const TimeGrid& grid, const ModelParams& params);

}  // namespace qprobe
