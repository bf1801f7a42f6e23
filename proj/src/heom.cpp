#include "qprobe/heom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "format.hpp"

namespace qprobe {

using detail::number;

AdoHierarchy::AdoHierarchy(int depth, AdoStorage storage) : depth_(depth), storage_(storage) {
    if (depth < 1) throw InvalidArgument("hierarchy depth must be at least 1");
    const int side = depth + 1;
    slot_.assign(static_cast<std::size_t>(side * side), -1);
    for (int total = 0; total <= depth; ++total) {
        for (int m = 0; m <= total; ++m) {
            const int n = total - m;
            if (storage == AdoStorage::Symmetric && m > n) continue;
            slot_[static_cast<std::size_t>(m * side + n)] = static_cast<long>(indices_.size());
            indices_.emplace_back(m, n);
        }
    }
    data_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(4 * indices_.size()));
}

AdoHierarchy AdoHierarchy::initial(int depth, const Matrix2cd& rho0, AdoStorage storage) {
    AdoHierarchy h(depth, storage);
    h.set_ado(0, 0, rho0);
    return h;
}

std::pair<long, bool> AdoHierarchy::locate(int m, int n) const {
    if (!contains(m, n)) return {-1, false};
    const int side = depth_ + 1;
    if (storage_ == AdoStorage::Symmetric && m > n) {
        return {slot_[static_cast<std::size_t>(n * side + m)], true};
    }
    return {slot_[static_cast<std::size_t>(m * side + n)], false};
}

Matrix2cd AdoHierarchy::ado(int m, int n) const {
    const auto [slot, adjoint] = locate(m, n);
    if (slot < 0) return Matrix2cd::Zero();
    const Eigen::Map<const Matrix2cd> block(data_.data() + 4 * slot);
    return adjoint ? Matrix2cd(block.adjoint()) : Matrix2cd(block);
}

void AdoHierarchy::set_ado(int m, int n, const Matrix2cd& value) {
    const auto [slot, adjoint] = locate(m, n);
    if (slot < 0) throw InvalidArgument("ADO index outside the truncated hierarchy");
    Eigen::Map<Matrix2cd> block(data_.data() + 4 * slot);
    if (adjoint) {
        block = value.adjoint();
    } else {
        block = value;
    }
}

double AdoHierarchy::conjugate_symmetry_residual() const {
    if (storage_ == AdoStorage::Symmetric) return 0.0;
    double r = 0.0;
    for (const auto& [m, n] : indices_) {
        if (m < n) r = std::max(r, (ado(m, n) - ado(n, m).adjoint()).cwiseAbs().maxCoeff());
        if (m == n) r = std::max(r, hermiticity_residual(ado(m, m)));
    }
    return r;
}

void HeomConfig::validate() const {
    model.validate();
    if (depth < 1) throw InvalidArgument("HEOM depth must be at least 1");
    if (step && !(*step > 0)) throw InvalidArgument("HEOM step must be positive");
    if (!(grid.step > 0) || grid.t_max < 0) throw InvalidArgument("HEOM output grid is invalid");
}

double default_heom_step(const ModelParams& model, double output_step) {
    const double rate = std::max({model.delta, model.gamma_env, model.coupling_strength});
    const double h = 0.01 / rate;
    if (!(output_step > 0)) return h;
    const double per_output = std::ceil(output_step / h - 1e-9);
    return output_step / per_output;
}

namespace {

// Precomputed neighbour table and operators; apply() is the hot loop.
class Generator {
public:
    Generator(const AdoHierarchy& layout, const HeomConfig& cfg)
        : hs_(system_hamiltonian(cfg.model.delta)),
          s_(cfg.coupling.matrix),
          gamma_(cfg.model.gamma_env),
          feed_(0.5 * cfg.model.coupling_strength * cfg.model.gamma_env) {
        for (const auto& [m, n] : layout.stored_indices()) {
            Entry e;
            e.m = m;
            e.n = n;
            e.lower_m = layout.locate(m - 1, n);
            e.lower_n = layout.locate(m, n - 1);
            e.upper_m = layout.locate(m + 1, n);
            e.upper_n = layout.locate(m, n + 1);
            entries_.push_back(e);
        }
    }

    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        const std::complex<double> minus_i(0.0, -1.0);
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const Entry& e = entries_[k];
            const Eigen::Map<const Matrix2cd> rho(in.data() + 4 * k);
            Matrix2cd d = minus_i * (hs_ * rho - rho * hs_) - (gamma_ * (e.m + e.n)) * rho;
            if (e.lower_m.first >= 0) d.noalias() += (feed_ * e.m) * (s_ * fetch(in, e.lower_m));
            if (e.lower_n.first >= 0) d.noalias() += (feed_ * e.n) * (fetch(in, e.lower_n) * s_);
            if (e.upper_m.first >= 0) {
                const Matrix2cd x = fetch(in, e.upper_m);
                d.noalias() -= s_ * x - x * s_;
            }
            if (e.upper_n.first >= 0) {
                const Matrix2cd y = fetch(in, e.upper_n);
                d.noalias() += s_ * y - y * s_;
            }
            Eigen::Map<Matrix2cd>(out.data() + 4 * k) = d;
        }
    }

private:
    struct Entry {
        int m, n;
        std::pair<long, bool> lower_m, lower_n, upper_m, upper_n;
    };

    static Matrix2cd fetch(const Eigen::VectorXcd& v, const std::pair<long, bool>& at) {
        const Eigen::Map<const Matrix2cd> block(v.data() + 4 * at.first);
        return at.second ? Matrix2cd(block.adjoint()) : Matrix2cd(block);
    }

    Matrix2cd hs_;
    Matrix2cd s_;
    double gamma_;
    double feed_;
    std::vector<Entry> entries_;
};

std::string storage_name(AdoStorage s) { return s == AdoStorage::Full ? "full" : "symmetric"; }

}  // namespace

AdoHierarchy heom_rhs(const AdoHierarchy& state, const HeomConfig& config) {
    AdoHierarchy out(state.depth(), state.storage());
    Generator(state, config).apply(state.data(), out.data());
    return out;
}

Trajectory<DensityMatrix> heom_propagate(const HeomConfig& config) {
    config.validate();
    const double h = config.step.value_or(default_heom_step(config.model, config.grid.step));
    const double ratio = config.grid.step / h;
    const long stride = std::lround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
        throw InvalidArgument("HEOM step must divide the output step exactly");
    }
    const std::size_t outputs = config.grid.size();
    const long total_steps = stride * static_cast<long>(outputs - 1);

    AdoHierarchy state = AdoHierarchy::initial(config.depth, config.initial.matrix(), config.storage);
    const Generator gen(state, config);
    Eigen::VectorXcd& y = state.data();
    const Eigen::Index dim = y.size();
    Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    Trajectory<DensityMatrix> traj;
    traj.times.reserve(outputs);
    traj.states.reserve(outputs);
    double trace_drift = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double symmetry = 0.0;

    PhysicalityTolerance snapshot_tol = kSolverTolerance;
    snapshot_tol.min_eigenvalue = -std::numeric_limits<double>::infinity();

    auto overflowed = [&] { return !y.allFinite() || y.cwiseAbs().maxCoeff() > 1e100; };

    for (long k = 0;; ++k) {
        if (k % stride == 0) {
            if (overflowed()) {
                std::ostringstream msg;
                msg << "HEOM hierarchy overflow at t = " << k * h << " (depth " << config.depth
                    << ", step " << h << "); use a smaller step or a larger depth";
                throw NumericalError(msg.str());
            }
            const Matrix2cd top = Eigen::Map<const Matrix2cd>(y.data());
            DensityMatrix rho;
            try {
                rho = DensityMatrix::from_matrix(top, snapshot_tol);
            } catch (const InvalidArgument& e) {
                std::ostringstream msg;
                msg << "HEOM state lost physicality at t = " << k * h << ": " << e.what();
                throw NumericalError(msg.str());
            }
            trace_drift = std::max(trace_drift, std::abs(top.trace() - 1.0));
            min_eigenvalue = std::min(min_eigenvalue, rho.min_eigenvalue());
            if (config.storage == AdoStorage::Full) {
                symmetry = std::max(symmetry, state.conjugate_symmetry_residual());
            }
            traj.times.push_back(config.grid.at(static_cast<std::size_t>(k / stride)));
            traj.states.push_back(rho);
        }
        if (k == total_steps) break;
        gen.apply(y, k1);
        tmp = y + (0.5 * h) * k1;
        gen.apply(tmp, k2);
        tmp = y + (0.5 * h) * k2;
        gen.apply(tmp, k3);
        tmp = y + h * k3;
        gen.apply(tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    traj.metadata["engine"] = "heom";
    traj.metadata["depth"] = std::to_string(config.depth);
    traj.metadata["step"] = number(h);
    traj.metadata["storage"] = storage_name(config.storage);
    traj.metadata["trace_drift"] = number(trace_drift);
    traj.metadata["min_eigenvalue"] = number(min_eigenvalue);
    traj.metadata["conjugate_symmetry_residual"] = number(symmetry);
    return traj;
}

namespace {

// Sup distance of the Pauli expectations; unlike to_bloch it tolerates the
// slightly unphysical states of a shallow hierarchy.
double component_distance(const Trajectory<DensityMatrix>& a, const Trajectory<DensityMatrix>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vector3d diff = bloch_components(a.states[i].matrix()) - bloch_components(b.states[i].matrix());
        d = std::max(d, diff.cwiseAbs().maxCoeff());
    }
    return d;
}

}  // namespace

ConvergedHeom heom_converged_propagate(const HeomConfig& config, const ConvergenceOptions& options) {
    if (!(options.depth_tolerance > 0) || !(options.step_tolerance > 0)) {
        throw InvalidArgument("convergence tolerances must be positive");
    }
    if (options.initial_depth < 1 || options.depth_increment < 1) {
        throw InvalidArgument("convergence depth schedule is invalid");
    }
    HeomConfig cfg = config;
    const double h0 = config.step.value_or(default_heom_step(config.model, config.grid.step));
    cfg.step = h0;

    auto run = [&](int depth, double h) {
        cfg.depth = depth;
        cfg.step = h;
        return heom_propagate(cfg);
    };

    ConvergedHeom result;
    int depth = options.initial_depth;
    auto current = run(depth, h0);
    double delta = std::numeric_limits<double>::infinity();
    bool depth_ok = false;
    while (depth + options.depth_increment <= options.max_depth) {
        auto deeper = run(depth + options.depth_increment, h0);
        delta = component_distance(current, deeper);
        if (delta < options.depth_tolerance) {
            depth_ok = true;
            break;
        }
        depth += options.depth_increment;
        current = std::move(deeper);
    }
    if (!depth_ok) {
        std::ostringstream msg;
        msg << "HEOM depth did not converge by N = " << options.max_depth << "; last delta " << delta
            << " vs tolerance " << options.depth_tolerance;
        throw NumericalError(msg.str());
    }
    result.depth = depth;
    result.depth_delta = delta;

    double h = h0;
    bool step_ok = false;
    for (int halvings = 0; halvings <= options.max_halvings; ++halvings) {
        auto finer = run(depth, 0.5 * h);
        delta = component_distance(current, finer);
        if (delta < options.step_tolerance) {
            step_ok = true;
            break;
        }
        h *= 0.5;
        current = std::move(finer);
    }
    if (!step_ok) {
        std::ostringstream msg;
        msg << "HEOM step did not converge after " << options.max_halvings << " halvings; last delta "
            << delta << " vs tolerance " << options.step_tolerance;
        throw NumericalError(msg.str());
    }
    result.step = h;
    result.step_delta = delta;
    result.trajectory = std::move(current);
    result.trajectory.metadata["depth_delta"] = number(result.depth_delta);
    result.trajectory.metadata["step_delta"] = number(result.step_delta);
    return result;
}

}  // namespace qprobe
