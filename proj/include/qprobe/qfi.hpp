#pragma once

// Quantum Fisher information of a qubit state with respect to a parameter,
// the five-point derivative stencil and the Cramer-Rao bound.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include "qprobe/types.hpp"

namespace qprobe {

/// Eigenvalues below this are outside the support of rho.
inline constexpr double kQfiRankTolerance = 1e-10;
/// Below this value of 1 - |r|^2 the state is treated as pure.
inline constexpr double kPureStateTolerance = 1e-12;

/// QFI from the spectral decomposition rho = sum_l xi_l |l><l|:
///   F = sum_l (d xi_l)^2 / xi_l + 4 sum_l xi_l <dl|dl>
///       - 8 sum_{l,l'} xi_l xi_l' / (xi_l + xi_l') |<dl|l'>|^2,
/// with eigenvalue and eigenvector derivatives obtained from drho by first-order
/// perturbation theory.  Degenerate spectra (rho = 1/2) use the eigenbasis of
/// drho, where the eigenvector terms cancel.
template <typename Scalar>
Scalar qfi_eigen(const Matrix2c<Scalar>& rho, const Matrix2c<Scalar>& drho) {
    using std::abs;
    using std::norm;
    using std::real;
    if (hermiticity_residual(drho) > Scalar(1e-8)) throw InvalidArgument("qfi_eigen: drho is not Hermitian");
    if (hermiticity_residual(rho) > Scalar(1e-8)) throw InvalidArgument("qfi_eigen: rho is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix2c<Scalar>> es(rho);
    Eigen::Matrix<Scalar, 2, 1> xi = es.eigenvalues();
    Matrix2c<Scalar> basis = es.eigenvectors();

    const bool degenerate = abs(xi(1) - xi(0)) < Scalar(kQfiRankTolerance);
    if (degenerate) {
        Eigen::SelfAdjointEigenSolver<Matrix2c<Scalar>> ed(drho);
        basis = ed.eigenvectors();
    }
    const Matrix2c<Scalar> d = basis.adjoint() * drho * basis;  // <l|drho|l'>

    Scalar f(0);
    for (int l = 0; l < 2; ++l) {
        if (xi(l) >= Scalar(kQfiRankTolerance)) {
            const Scalar dxi = real(d(l, l));
            f += dxi * dxi / xi(l);
        }
    }
    if (degenerate) return f;

    // <l'|dl> = <l'|drho|l> / (xi_l - xi_l') for l' != l, gauge <l|dl> = 0.
    Matrix2c<Scalar> overlap = Matrix2c<Scalar>::Zero();  // overlap(l', l) = <l'|dl>
    for (int l = 0; l < 2; ++l)
        for (int lp = 0; lp < 2; ++lp)
            if (lp != l) overlap(lp, l) = d(lp, l) / (xi(l) - xi(lp));

    for (int l = 0; l < 2; ++l) {
        const Scalar dl_norm = overlap.col(l).squaredNorm();
        f += Scalar(4) * xi(l) * dl_norm;
        for (int lp = 0; lp < 2; ++lp) {
            const Scalar s = xi(l) + xi(lp);
            if (s > Scalar(kQfiRankTolerance)) f -= Scalar(8) * xi(l) * xi(lp) / s * norm(overlap(lp, l));
        }
    }
    return f;
}

/// F = |dr|^2 + (r.dr)^2 / (1 - |r|^2); the second term is dropped for pure states.
template <typename Scalar>
Scalar qfi_bloch(const Vector3<Scalar>& r, const Vector3<Scalar>& dr) {
    const Scalar n2 = r.squaredNorm();
    if (n2 > (Scalar(1) + Scalar(kBlochNormSlack)) * (Scalar(1) + Scalar(kBlochNormSlack))) {
        throw InvalidArgument("qfi_bloch: |r| > 1");
    }
    Scalar f = dr.squaredNorm();
    const Scalar purity_gap = Scalar(1) - n2;
    if (purity_gap >= Scalar(kPureStateTolerance)) {
        const Scalar p = r.dot(dr);
        f += p * p / purity_gap;
    }
    return f;
}

/// Combination step of finite_diff for precomputed stencil values x+2e, x+e, x-e, x-2e.
template <typename T, typename Scalar>
T stencil_combine(const T& p2, const T& p1, const T& m1, const T& m2, Scalar eps) {
    return T((-p2 + Scalar(8) * p1 - Scalar(8) * m1 + m2) / (Scalar(12) * eps));
}

/// (-f(x+2e) + 8 f(x+e) - 8 f(x-e) + f(x-2e)) / (12 e).  Works for any f whose
/// values support linear combination (scalars, Eigen vectors).
template <typename Scalar, typename F>
auto finite_diff(F&& f, Scalar x, Scalar eps) {
    using T = std::decay_t<decltype(f(x))>;
    const T p2 = f(x + Scalar(2) * eps);
    const T p1 = f(x + eps);
    const T m1 = f(x - eps);
    const T m2 = f(x - Scalar(2) * eps);
    return stencil_combine(p2, p1, m1, m2, eps);
}

/// delta theta >= 1 / sqrt(nu F).
inline double cramer_rao_bound(double fisher, int repetitions = 1) {
    if (!(fisher > 0)) throw InvalidArgument("cramer_rao_bound: Fisher information must be positive");
    if (repetitions < 1) throw InvalidArgument("cramer_rao_bound: need at least one repetition");
    return 1.0 / std::sqrt(static_cast<double>(repetitions) * fisher);
}

}  // namespace qprobe
