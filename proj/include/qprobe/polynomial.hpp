#pragma once

// Dense polynomials, companion-matrix roots and exact inverse Laplace
// transforms of strictly proper rational functions by residues.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "qprobe/errors.hpp"

namespace qprobe {

/// c_0 + c_1 x + ... + c_d x^d, coefficients ascending.
template <typename Scalar>
class BasicPolynomial {
public:
    using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicPolynomial() : c_(Coefficients::Zero(1)) {}
    explicit BasicPolynomial(Coefficients c) : c_(std::move(c)) {
        if (c_.size() == 0) c_ = Coefficients::Zero(1);
        trim();
    }
    BasicPolynomial(std::initializer_list<Scalar> c) : c_(static_cast<Eigen::Index>(c.size())) {
        Eigen::Index i = 0;
        for (const Scalar& v : c) c_(i++) = v;
        if (c_.size() == 0) c_ = Coefficients::Zero(1);
        trim();
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Coefficients& coefficients() const { return c_; }
    Scalar coefficient(int i) const { return i <= degree() ? c_(i) : Scalar(0); }
    Scalar leading() const { return c_(c_.size() - 1); }
    bool is_zero() const { return degree() == 0 && c_(0) == Scalar(0); }

    /// Horner evaluation at any scalar type that mixes with Scalar.
    template <typename T>
    auto operator()(const T& x) const -> decltype(Scalar() * x) {
        using R = decltype(Scalar() * x);
        R acc = R(c_(c_.size() - 1));
        for (Eigen::Index i = c_.size() - 2; i >= 0; --i) acc = acc * x + R(c_(i));
        return acc;
    }

    BasicPolynomial derivative() const {
        if (degree() == 0) return BasicPolynomial();
        Coefficients d(c_.size() - 1);
        for (Eigen::Index i = 1; i < c_.size(); ++i) d(i - 1) = c_(i) * Scalar(static_cast<double>(i));
        return BasicPolynomial(d);
    }

    /// Coefficients of p(x0 + u) in powers of u (Taylor coefficients at x0).
    Coefficients taylor_at(const Scalar& x0) const {
        Coefficients a = c_;
        const Eigen::Index n = a.size();
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index i = n - 2; i >= k; --i) a(i) += x0 * a(i + 1);
        }
        return a;
    }

    friend BasicPolynomial operator*(const BasicPolynomial& a, const BasicPolynomial& b) {
        Coefficients c = Coefficients::Zero(a.c_.size() + b.c_.size() - 1);
        for (Eigen::Index i = 0; i < a.c_.size(); ++i)
            for (Eigen::Index j = 0; j < b.c_.size(); ++j) c(i + j) += a.c_(i) * b.c_(j);
        return BasicPolynomial(c);
    }

    friend BasicPolynomial operator+(const BasicPolynomial& a, const BasicPolynomial& b) {
        const Eigen::Index n = std::max(a.c_.size(), b.c_.size());
        Coefficients c = Coefficients::Zero(n);
        c.head(a.c_.size()) += a.c_;
        c.head(b.c_.size()) += b.c_;
        return BasicPolynomial(c);
    }

    friend BasicPolynomial operator*(const Scalar& s, const BasicPolynomial& p) {
        return BasicPolynomial(Coefficients(p.c_ * s));
    }

private:
    void trim() {
        Eigen::Index n = c_.size();
        while (n > 1 && c_(n - 1) == Scalar(0)) --n;
        c_.conservativeResize(n);
    }

    Coefficients c_;
};

using Polynomial = BasicPolynomial<double>;
using ComplexPolynomial = BasicPolynomial<std::complex<double>>;

/// Roots of a real polynomial: eigenvalues of the companion matrix, each polished
/// by one Newton step.  Throws NumericalError if the eigen-solver fails.
std::vector<std::complex<double>> polynomial_roots(const Polynomial& p);

struct RationalFunction {
    Polynomial numerator;
    Polynomial denominator;

    std::complex<double> operator()(std::complex<double> lambda) const {
        return numerator(lambda) / denominator(lambda);
    }
};

/// One pole of multiplicity k contributes sum_j coefficients[j] t^j e^{pole t}, j < k.
struct ResidueTerm {
    std::complex<double> pole;
    std::vector<std::complex<double>> coefficients;
};

/// Time-domain signal f(t) = sum over terms; the inverse Laplace transform of a
/// strictly proper rational function.
struct ResidueExpansion {
    std::vector<ResidueTerm> terms;

    std::complex<double> operator()(double t) const;
    double max_real_pole() const;
};

/// Relative distance below which roots are grouped into one confluent cluster.
/// Companion eigenvalues of a k-fold root scatter by about eps^(1/k).
inline constexpr double kRootSeparation = 1e-4;

/// Partial-fraction inversion.  Roots closer than `separation` (relative) are
/// grouped and their joint contribution is evaluated as a divided difference,
/// expanded about the cluster centre; coincident roots reduce to the confluent formula.
ResidueExpansion inverse_laplace(const RationalFunction& f, double separation = kRootSeparation);

}  // namespace qprobe
