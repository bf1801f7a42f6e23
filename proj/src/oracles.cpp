#include "qprobe/oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "format.hpp"

namespace qprobe {

Trajectory<BlochVector> lindblad_propagate(const BlochVector& r0, const TimeGrid& grid, double delta,
                                           double coupling) {
    if (!std::isfinite(delta) || !std::isfinite(coupling) || coupling < 0) {
        throw InvalidArgument("lindblad_propagate: need finite delta and Gamma >= 0");
    }
    Eigen::Matrix3d generator;
    generator << -2 * coupling, 0, 0,
                 0, -2 * coupling, -delta,
                 0, delta, 0;

    Trajectory<BlochVector> traj;
    traj.times = grid.points();
    traj.states.reserve(traj.times.size());
    for (double t : traj.times) {
        const Eigen::Matrix3d propagator = (generator * t).exp();
        traj.states.emplace_back(Vector3d(propagator * r0.vector()));
    }
    traj.metadata["engine"] = "lindblad";
    return traj;
}

double dephasing_coherence(double t, double coupling, double gamma) {
    if (t < 0) throw InvalidArgument("dephasing_coherence: negative time");
    return std::exp(-4.0 * OuCorrelation{coupling, gamma}.double_integral(t));
}

namespace {

using Occupation = std::vector<int>;

// All occupation vectors of `modes` modes with total <= cap, in lexicographic order.
std::vector<Occupation> fock_states(std::size_t modes, int cap) {
    std::vector<Occupation> out;
    Occupation current(modes, 0);
    auto recurse = [&](auto&& self, std::size_t k, int remaining) -> void {
        if (k == modes) {
            out.push_back(current);
            return;
        }
        for (int n = 0; n <= remaining; ++n) {
            current[k] = n;
            self(self, k + 1, remaining - n);
        }
        current[k] = 0;
    };
    recurse(recurse, 0, cap);
    return out;
}

// Number of occupation vectors with total <= cap: C(modes + cap, cap).
double fock_count(std::size_t modes, int cap) {
    double c = 1.0;
    for (int j = 1; j <= cap; ++j) c *= static_cast<double>(modes + j) / j;
    return c;
}

}  // namespace

FewModeResult few_mode_schrodinger(const DiscretizedBath& bath, const CouplingOperator& coupling,
                                   const ModelParams& model, const TimeGrid& grid, const Vector2cd& psi0,
                                   const FewModeOptions& options) {
    if (options.occupation_cap < 0) throw InvalidArgument("few_mode_schrodinger: negative occupation cap");
    if (psi0.norm() == 0.0) throw InvalidArgument("few_mode_schrodinger: zero initial state");
    if (options.coupling == FewModeCoupling::RotatingWave && coupling.kind != CouplingKind::PerpendicularZ) {
        throw InvalidArgument("few_mode_schrodinger: the rotating-wave variant requires S = sigma_z");
    }
    if (coupling.matrix.imag().cwiseAbs().maxCoeff() > 0.0) {
        throw InvalidArgument("few_mode_schrodinger: coupling operator must be real");
    }

    const std::size_t modes = bath.size();
    const double bath_states = fock_count(modes, options.occupation_cap);
    if (2.0 * bath_states > static_cast<double>(options.max_dimension)) {
        std::ostringstream msg;
        msg << "few_mode_schrodinger: dimension " << 2.0 * bath_states << " exceeds the cap "
            << options.max_dimension << "; reduce the mode count K = " << modes << " or the occupation cap "
            << options.occupation_cap << " (dimension = 2 C(K + cap, cap))";
        throw InvalidArgument(msg.str());
    }

    const std::vector<Occupation> fock = fock_states(modes, options.occupation_cap);
    std::map<Occupation, Eigen::Index> index;
    for (std::size_t i = 0; i < fock.size(); ++i) index.emplace(fock[i], static_cast<Eigen::Index>(i));
    const Eigen::Index nb = static_cast<Eigen::Index>(fock.size());
    const Eigen::Index dim = 2 * nb;

    // Probe operators in the sigma_z basis; all real.
    const Eigen::Matrix2d hs = system_hamiltonian(model.delta).real();
    Eigen::Matrix2d raise, lower, s;
    raise << 0.5, -0.5, 0.5, -0.5;  // |+><-|
    lower = raise.transpose();
    s = coupling.matrix.real();

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    auto at = [nb](int probe, Eigen::Index beta) { return probe * nb + beta; };

    for (Eigen::Index beta = 0; beta < nb; ++beta) {
        const Occupation& occ = fock[static_cast<std::size_t>(beta)];
        double bath_energy = 0.0;
        int total = 0;
        for (std::size_t k = 0; k < modes; ++k) {
            bath_energy += bath.modes[k].frequency * occ[k];
            total += occ[k];
        }
        for (int a = 0; a < 2; ++a) {
            h(at(a, beta), at(a, beta)) += bath_energy;
            for (int b = 0; b < 2; ++b) h(at(a, beta), at(b, beta)) += hs(a, b);
        }
        if (total >= options.occupation_cap) continue;
        // b_k^dagger |occ> = sqrt(n_k + 1) |occ + e_k>; fill the pair of Hermitian entries.
        for (std::size_t k = 0; k < modes; ++k) {
            Occupation up = occ;
            ++up[k];
            const Eigen::Index gamma = index.at(up);
            const double amp = std::sqrt(bath.modes[k].weight) * std::sqrt(static_cast<double>(occ[k] + 1));
            // <a, up| H_i |b, occ>
            const Eigen::Matrix2d block =
                options.coupling == FewModeCoupling::Full ? Eigen::Matrix2d(s) : Eigen::Matrix2d(lower);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double v = amp * block(a, b);
                    if (v == 0.0) continue;
                    h(at(a, gamma), at(b, beta)) += v;
                    h(at(b, beta), at(a, gamma)) += v;
                }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("few_mode_schrodinger: diagonalization failed");
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd& energy = es.eigenvalues();

    Eigen::VectorXcd psi_init = Eigen::VectorXcd::Zero(dim);
    const Vector2cd u = psi0.normalized();
    const Eigen::Index vacuum = index.at(Occupation(modes, 0));
    psi_init(at(0, vacuum)) = u(0);
    psi_init(at(1, vacuum)) = u(1);
    const Eigen::VectorXcd c = v.transpose().cast<std::complex<double>>() * psi_init;

    FewModeResult result;
    result.dimension = static_cast<std::size_t>(dim);
    if (modes >= 2) {
        const double spacing = std::abs(bath.modes[1].frequency - bath.modes[0].frequency);
        result.recurrence_time = spacing > 0 ? 2 * std::numbers::pi / spacing : 0.0;
    }
    result.reduced.times = grid.points();
    for (double t : result.reduced.times) {
        Eigen::VectorXcd phased(dim);
        for (Eigen::Index j = 0; j < dim; ++j) phased(j) = c(j) * std::exp(std::complex<double>(0, -energy(j) * t));
        const Eigen::VectorXcd psi = v.cast<std::complex<double>>() * phased;
        result.norm_drift = std::max(result.norm_drift, std::abs(psi.squaredNorm() - 1.0));
        result.survival.push_back(psi_init.dot(psi));

        const auto upper = psi.head(nb);
        const auto down = psi.tail(nb);
        Matrix2cd rho;
        rho(0, 0) = upper.squaredNorm();
        rho(1, 1) = down.squaredNorm();
        rho(0, 1) = down.dot(upper);  // sum_beta psi(0,beta) conj(psi(1,beta))
        rho(1, 0) = std::conj(rho(0, 1));
        rho /= rho.trace().real();
        result.reduced.states.push_back(DensityMatrix::from_matrix(rho, kSolverTolerance));
    }
    result.reduced.metadata["engine"] = "few_mode";
    result.reduced.metadata["dimension"] = std::to_string(dim);
    result.reduced.metadata["recurrence_time"] = detail::number(result.recurrence_time);
    return result;
}

}  // namespace qprobe
