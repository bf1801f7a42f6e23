#pragma once

// Pauli algebra, qubit state representations, model parameters and the
// probe-environment coupling operator.
//
// Conventions used throughout the library:
//   * matrices are written in the sigma_z eigenbasis {|0>, |1>}, sigma_z|0> = |0>;
//   * |+>, |-> are the sigma_x eigenvectors, sigma_x|+-> = +-|+->, with
//     |+-> = (|0> +- |1>)/sqrt(2).  The same pair is used by every module.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qprobe/errors.hpp"

namespace qprobe {

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
template <typename Scalar>
using Vector2c = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Matrix2cd = Matrix2c<double>;
using Vector2cd = Vector2c<double>;
using Vector3d = Vector3<double>;

namespace pauli {

template <typename Scalar = double>
Matrix2c<Scalar> identity() {
    return Matrix2c<Scalar>::Identity();
}

template <typename Scalar = double>
Matrix2c<Scalar> x() {
    Matrix2c<Scalar> m;
    m << Scalar(0), Scalar(1), Scalar(1), Scalar(0);
    return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> y() {
    using C = std::complex<Scalar>;
    Matrix2c<Scalar> m;
    m << C(0), C(0, -1), C(0, 1), C(0);
    return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> z() {
    Matrix2c<Scalar> m;
    m << Scalar(1), Scalar(0), Scalar(0), Scalar(-1);
    return m;
}

/// sigma_x eigenvector with eigenvalue +1.
template <typename Scalar = double>
Vector2c<Scalar> plus() {
    using std::sqrt;
    const Scalar s = Scalar(1) / sqrt(Scalar(2));
    return Vector2c<Scalar>(s, s);
}

/// sigma_x eigenvector with eigenvalue -1.
template <typename Scalar = double>
Vector2c<Scalar> minus() {
    using std::sqrt;
    const Scalar s = Scalar(1) / sqrt(Scalar(2));
    return Vector2c<Scalar>(s, -s);
}

/// Columns are |+>, |->.  Unitary and real symmetric, hence its own inverse.
template <typename Scalar = double>
Matrix2c<Scalar> sigma_x_basis() {
    Matrix2c<Scalar> u;
    u.col(0) = plus<Scalar>();
    u.col(1) = minus<Scalar>();
    return u;
}

/// Re-expresses an operator in the {|+>, |->} basis.
template <typename Scalar>
Matrix2c<Scalar> to_sigma_x_basis(const Matrix2c<Scalar>& op) {
    const Matrix2c<Scalar> u = sigma_x_basis<Scalar>();
    return u.adjoint() * op * u;
}

template <typename Scalar>
Matrix2c<Scalar> from_sigma_x_basis(const Matrix2c<Scalar>& op) {
    const Matrix2c<Scalar> u = sigma_x_basis<Scalar>();
    return u * op * u.adjoint();
}

}  // namespace pauli

template <typename Scalar>
Matrix2c<Scalar> commutator(const Matrix2c<Scalar>& a, const Matrix2c<Scalar>& b) {
    return a * b - b * a;
}

template <typename Scalar>
Scalar hermiticity_residual(const Matrix2c<Scalar>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Acceptance thresholds for treating a 2x2 matrix as a physical state.
struct PhysicalityTolerance {
    double hermiticity = 1e-12;
    double trace = 1e-10;
    double min_eigenvalue = -1e-9;
};

/// Looser thresholds applied to solver output snapshots.
inline constexpr PhysicalityTolerance kSolverTolerance{1e-9, 1e-8, -1e-6};

/// Tolerance for |r| <= 1 on Bloch vectors.
inline constexpr double kBlochNormSlack = 1e-9;

/// Real 3-vector of Pauli expectation values with |r| <= 1.
template <typename Scalar>
class BasicBlochVector {
public:
    BasicBlochVector() : r_(Vector3<Scalar>::Zero()) {}

    BasicBlochVector(Scalar rx, Scalar ry, Scalar rz) : BasicBlochVector(Vector3<Scalar>(rx, ry, rz)) {}

    explicit BasicBlochVector(const Vector3<Scalar>& r) : r_(r) {
        if (!r_.allFinite()) throw InvalidArgument("Bloch vector has non-finite components");
        if (r_.norm() > Scalar(1) + Scalar(kBlochNormSlack)) {
            throw InvalidArgument("Bloch vector norm exceeds 1: unphysical state");
        }
    }

    Scalar x() const { return r_(0); }
    Scalar y() const { return r_(1); }
    Scalar z() const { return r_(2); }
    Scalar norm() const { return r_.norm(); }
    const Vector3<Scalar>& vector() const { return r_; }

private:
    Vector3<Scalar> r_;
};

/// Hermitian, unit-trace, positive semidefinite 2x2 matrix.
template <typename Scalar>
class BasicDensityMatrix {
public:
    BasicDensityMatrix() : m_(Matrix2c<Scalar>::Identity() * Scalar(0.5)) {}

    /// Validates the physicality invariants against `tol` and throws InvalidArgument on failure.
    static BasicDensityMatrix from_matrix(const Matrix2c<Scalar>& m, const PhysicalityTolerance& tol = {}) {
        if (!m.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
        if (hermiticity_residual(m) > Scalar(tol.hermiticity)) {
            throw InvalidArgument("density matrix is not Hermitian");
        }
        using std::abs;
        if (abs(m.trace() - std::complex<Scalar>(1)) > Scalar(tol.trace)) {
            throw InvalidArgument("density matrix trace differs from 1");
        }
        BasicDensityMatrix rho;
        rho.m_ = m;
        if (rho.min_eigenvalue() < Scalar(tol.min_eigenvalue)) {
            throw InvalidArgument("density matrix has a negative eigenvalue");
        }
        return rho;
    }

    static BasicDensityMatrix pure(const Vector2c<Scalar>& psi) {
        const Vector2c<Scalar> u = psi.normalized();
        return from_matrix(u * u.adjoint());
    }

    const Matrix2c<Scalar>& matrix() const { return m_; }
    std::complex<Scalar> operator()(int i, int j) const { return m_(i, j); }

    /// Smaller eigenvalue, computed from the Bloch length of the Hermitian part.
    Scalar min_eigenvalue() const {
        using std::norm;
        using std::real;
        using std::sqrt;
        const Scalar half_trace = real(m_.trace()) / Scalar(2);
        const Scalar d = (real(m_(0, 0)) - real(m_(1, 1))) / Scalar(2);
        const std::complex<Scalar> off = (m_(0, 1) + std::conj(m_(1, 0))) / Scalar(2);
        return half_trace - sqrt(d * d + norm(off));
    }

private:
    Matrix2c<Scalar> m_;
};

using BlochVector = BasicBlochVector<double>;
using DensityMatrix = BasicDensityMatrix<double>;

/// <sigma_i> = Tr(sigma_i rho).
template <typename Scalar>
BasicBlochVector<Scalar> bloch_from_density(const BasicDensityMatrix<Scalar>& rho) {
    const Matrix2c<Scalar>& m = rho.matrix();
    using std::real;
    return BasicBlochVector<Scalar>(real((pauli::x<Scalar>() * m).trace()),
                                    real((pauli::y<Scalar>() * m).trace()),
                                    real((pauli::z<Scalar>() * m).trace()));
}

/// Variant for raw matrices: rejects Hermiticity residuals above 1e-8 and takes
/// Pauli traces without enforcing trace or positivity.
template <typename Scalar>
Vector3<Scalar> bloch_components(const Matrix2c<Scalar>& m) {
    if (hermiticity_residual(m) > Scalar(1e-8)) {
        throw InvalidArgument("cannot take Bloch components of a non-Hermitian matrix");
    }
    using std::real;
    return Vector3<Scalar>(real((pauli::x<Scalar>() * m).trace()), real((pauli::y<Scalar>() * m).trace()),
                           real((pauli::z<Scalar>() * m).trace()));
}

/// rho = (1 + r.sigma)/2.
template <typename Scalar>
BasicDensityMatrix<Scalar> density_from_bloch(const BasicBlochVector<Scalar>& r) {
    const Matrix2c<Scalar> m = (pauli::identity<Scalar>() + pauli::x<Scalar>() * r.x() +
                                pauli::y<Scalar>() * r.y() + pauli::z<Scalar>() * r.z()) *
                               Scalar(0.5);
    PhysicalityTolerance tol;
    tol.min_eigenvalue = -kBlochNormSlack;
    return BasicDensityMatrix<Scalar>::from_matrix(m, tol);
}

/// Delta, Gamma, gamma, chi.  All rates share one frequency unit.
struct ModelParams {
    double delta = 1.0;              ///< tunneling frequency, the estimated parameter
    double gamma_env = 1.0;          ///< inverse memory time of the environment
    double coupling_strength = 0.1;  ///< probe-environment coupling Gamma
    double chi = 0.0;                ///< weight of sigma_z in the mixed coupling

    void validate() const {
        if (!std::isfinite(delta) || !std::isfinite(gamma_env) || !std::isfinite(coupling_strength) ||
            !std::isfinite(chi)) {
            throw InvalidArgument("model parameters must be finite");
        }
        if (delta <= 0) throw InvalidArgument("delta must be positive");
        if (gamma_env <= 0) throw InvalidArgument("gamma_env must be positive");
        if (coupling_strength < 0) throw InvalidArgument("coupling_strength must be non-negative");
    }

    ModelParams with_delta(double d) const {
        ModelParams p = *this;
        p.delta = d;
        return p;
    }
};

/// H_s = Delta sigma_x / 2.
inline Matrix2cd system_hamiltonian(double delta) { return pauli::x() * (0.5 * delta); }

enum class CouplingKind { PerpendicularZ, Mixed };

/// The probe operator S entering H_i = S (x) B.
struct CouplingOperator {
    Matrix2cd matrix;
    CouplingKind kind = CouplingKind::PerpendicularZ;
    double chi = 0.0;

    /// True when [S, H_s] = 0, i.e. the coupling only dephases.
    bool commutes_with_system() const { return kind == CouplingKind::Mixed && chi == 0.0; }
};

/// PerpendicularZ gives sigma_z (chi ignored); Mixed(chi) gives sigma_x + chi sigma_z.
inline CouplingOperator coupling_operator(double chi, CouplingKind kind) {
    if (!std::isfinite(chi)) throw InvalidArgument("chi must be finite");
    CouplingOperator op;
    op.kind = kind;
    if (kind == CouplingKind::PerpendicularZ) {
        op.matrix = pauli::z();
        op.chi = 0.0;
    } else {
        op.matrix = pauli::x() + pauli::z() * chi;
        op.chi = chi;
    }
    return op;
}

/// Uniform grid {0, dt, 2dt, ..., t_max}.
struct TimeGrid {
    double t_max = 0.0;
    double step = 1.0;

    std::size_t size() const {
        if (!(step > 0) || t_max < 0) throw InvalidArgument("time grid needs step > 0 and t_max >= 0");
        return static_cast<std::size_t>(std::llround(t_max / step)) + 1;
    }
    double at(std::size_t i) const { return static_cast<double>(i) * step; }
    std::vector<double> points() const {
        std::vector<double> t(size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = at(i);
        return t;
    }
};

/// Time series of states with free-form provenance metadata.
template <typename State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return times.size(); }
};

template <typename Scalar>
Trajectory<BasicBlochVector<Scalar>> to_bloch(const Trajectory<BasicDensityMatrix<Scalar>>& in) {
    Trajectory<BasicBlochVector<Scalar>> out;
    out.times = in.times;
    out.metadata = in.metadata;
    out.states.reserve(in.states.size());
    for (const auto& rho : in.states) out.states.push_back(bloch_from_density(rho));
    return out;
}

/// max_t max_i |r_i(t) - s_i(t)| over a shared grid.
inline double sup_distance(const Trajectory<BlochVector>& a, const Trajectory<BlochVector>& b) {
    if (a.size() != b.size()) throw InvalidArgument("trajectories are on different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, (a.states[i].vector() - b.states[i].vector()).cwiseAbs().maxCoeff());
    }
    return d;
}

}  // namespace qprobe
