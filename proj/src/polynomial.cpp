#include "qprobe/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qprobe {

std::vector<std::complex<double>> polynomial_roots(const Polynomial& p) {
    const int d = p.degree();
    if (d < 1) return {};
    const double lead = p.leading();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    companion.block(1, 0, d - 1, d - 1).setIdentity();
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -p.coefficient(i) / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver did not converge");

    const Polynomial dp = p.derivative();
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        std::complex<double> z = solver.eigenvalues()(i);
        const std::complex<double> slope = dp(z);
        if (std::abs(slope) > 0) {
            const std::complex<double> polished = z - p(z) / slope;
            if (std::isfinite(polished.real()) && std::isfinite(polished.imag()) &&
                std::abs(p(polished)) <= std::abs(p(z))) {
                z = polished;
            }
        }
        roots.push_back(z);
    }
    return roots;
}

std::complex<double> ResidueExpansion::operator()(double t) const {
    std::complex<double> sum = 0.0;
    for (const auto& term : terms) {
        std::complex<double> poly = 0.0;
        double power = 1.0;
        for (const auto& c : term.coefficients) {
            poly += c * power;
            power *= t;
        }
        sum += poly * std::exp(term.pole * t);
    }
    return sum;
}

double ResidueExpansion::max_real_pole() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& term : terms) m = std::max(m, term.pole.real());
    return m;
}

namespace {

// Offsets beyond the cluster centre are resolved to (t * spread)^kSeriesTerms.
constexpr int kSeriesTerms = 14;

struct Cluster {
    std::complex<double> centre;
    std::vector<std::complex<double>> members;
};

// Transitive grouping of roots closer than separation * (1 + |root|).
std::vector<Cluster> cluster_roots(const std::vector<std::complex<double>>& roots, double separation) {
    const std::size_t n = roots.size();
    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < n; ++b) {
                if (label[b] < 0 && std::abs(roots[a] - roots[b]) < separation * (1.0 + std::abs(roots[a]))) {
                    label[b] = next;
                    stack.push_back(b);
                }
            }
        }
        ++next;
    }
    std::vector<Cluster> clusters(static_cast<std::size_t>(next));
    for (std::size_t i = 0; i < n; ++i) clusters[static_cast<std::size_t>(label[i])].members.push_back(roots[i]);
    for (auto& c : clusters) {
        std::complex<double> sum = 0.0;
        for (const auto& z : c.members) sum += z;
        c.centre = sum / static_cast<double>(c.members.size());
    }
    return clusters;
}

// Complete homogeneous symmetric polynomials h_0..h_order of the offsets.
std::vector<std::complex<double>> complete_homogeneous(const std::vector<std::complex<double>>& offsets, int order) {
    std::vector<std::complex<double>> h(static_cast<std::size_t>(order + 1), 0.0);
    h[0] = 1.0;
    for (const auto& d : offsets)
        for (int j = 1; j <= order; ++j) h[static_cast<std::size_t>(j)] += d * h[static_cast<std::size_t>(j - 1)];
    return h;
}

}  // namespace

// For a cluster of roots p_1..p_k around c, the sum of their residues of
// e^{lambda t} N / (lead * prod(lambda - p)) is the divided difference
// g[p_1..p_k] of g = e^{lambda t} R with R = N / (lead * prod over the other roots).
// Expanding g in Taylor series at c,
//   g[p_1..p_k] = sum_{m >= k-1} g_m h_{m-k+1}(p - c),
// which is exact for coincident roots and stable for nearly coincident ones.
ResidueExpansion inverse_laplace(const RationalFunction& f, double separation) {
    const int dn = f.numerator.degree();
    const int dd = f.denominator.degree();
    if (f.denominator.is_zero()) throw InvalidArgument("inverse_laplace: zero denominator");
    if (!f.numerator.is_zero() && dn >= dd) throw InvalidArgument("inverse_laplace: function is not strictly proper");

    ResidueExpansion out;
    if (f.numerator.is_zero()) return out;

    const std::vector<Cluster> clusters = cluster_roots(polynomial_roots(f.denominator), separation);
    const ComplexPolynomial numerator(
        ComplexPolynomial::Coefficients(f.numerator.coefficients().cast<std::complex<double>>()));

    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const Cluster& cl = clusters[c];
        const int k = static_cast<int>(cl.members.size());
        const bool exact = std::all_of(cl.members.begin(), cl.members.end(),
                                       [&](const std::complex<double>& z) { return z == cl.centre; });
        const int extra = exact ? 0 : kSeriesTerms;
        const int order = k - 1 + extra;

        ComplexPolynomial q{std::complex<double>(f.denominator.leading())};
        for (std::size_t o = 0; o < clusters.size(); ++o) {
            if (o == c) continue;
            for (const auto& z : clusters[o].members) q = q * ComplexPolynomial{-z, 1.0};
        }
        // Taylor coefficients r_0..r_order of R at the centre by series division.
        const auto n_taylor = numerator.taylor_at(cl.centre);
        const auto q_taylor = q.taylor_at(cl.centre);
        std::vector<std::complex<double>> r(static_cast<std::size_t>(order + 1));
        for (int i = 0; i <= order; ++i) {
            std::complex<double> acc = i < n_taylor.size() ? n_taylor(i) : 0.0;
            for (int j = 1; j <= i && j < q_taylor.size(); ++j) acc -= q_taylor(j) * r[static_cast<std::size_t>(i - j)];
            r[static_cast<std::size_t>(i)] = acc / q_taylor(0);
        }
        std::vector<std::complex<double>> offsets;
        for (const auto& z : cl.members) offsets.push_back(z - cl.centre);
        const auto h = complete_homogeneous(offsets, extra);

        // g_m = e^{ct} sum_{a+b=m} t^a / a! r_b, so the coefficient of t^a is
        // (1/a!) sum_{m >= max(k-1, a)} r_{m-a} h_{m-k+1}.
        ResidueTerm term;
        term.pole = cl.centre;
        double factorial = 1.0;
        for (int a = 0; a <= order; ++a) {
            if (a > 0) factorial *= a;
            std::complex<double> acc = 0.0;
            for (int m = std::max(k - 1, a); m <= order; ++m)
                acc += r[static_cast<std::size_t>(m - a)] * h[static_cast<std::size_t>(m - k + 1)];
            term.coefficients.push_back(acc / factorial);
        }
        out.terms.push_back(std::move(term));
    }
    return out;
}

}  // namespace qprobe
