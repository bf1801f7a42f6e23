#pragma once

// Hierarchy of auxiliary density operators rho^(m,n), m + n <= N, for the
// Ornstein-Uhlenbeck bath:
//
//   d/dt rho^(m,n) = -i[H_s, rho^(m,n)] - gamma (m+n) rho^(m,n)
//                    + (Gamma gamma / 2) [m S rho^(m-1,n) + n rho^(m,n-1) S]
//                    - [S, rho^(m+1,n)] + [S, rho^(m,n+1)],
//
// with rho^(0,0) the probe state and everything beyond depth N set to zero.
// Propagation is fixed-step classical RK4.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qprobe/types.hpp"

namespace qprobe {

/// Full keeps every (m,n); Symmetric keeps m <= n and uses rho^(n,m) = rho^(m,n)^dagger.
enum class AdoStorage { Full, Symmetric };

class AdoHierarchy {
public:
    AdoHierarchy(int depth, AdoStorage storage = AdoStorage::Symmetric);

    /// rho^(0,0) = rho0, all auxiliaries zero.
    static AdoHierarchy initial(int depth, const Matrix2cd& rho0, AdoStorage storage = AdoStorage::Symmetric);

    int depth() const { return depth_; }
    AdoStorage storage() const { return storage_; }
    std::size_t stored_count() const { return indices_.size(); }
    const std::vector<std::pair<int, int>>& stored_indices() const { return indices_; }

    bool contains(int m, int n) const { return m >= 0 && n >= 0 && m + n <= depth_; }

    /// rho^(m,n); zero outside the truncated index set, reconstructed from the
    /// adjoint partner when only m <= n is stored.
    Matrix2cd ado(int m, int n) const;

    /// Writes rho^(m,n).  In symmetric storage, writing m > n stores the adjoint at (n,m).
    void set_ado(int m, int n, const Matrix2cd& value);

    /// Slot of the stored representative of (m,n) and whether it must be adjointed; -1 if outside.
    std::pair<long, bool> locate(int m, int n) const;

    Eigen::VectorXcd& data() { return data_; }
    const Eigen::VectorXcd& data() const { return data_; }

    /// max |rho^(m,n) - rho^(n,m)^dagger|; identically zero in symmetric storage.
    double conjugate_symmetry_residual() const;

private:
    int depth_;
    AdoStorage storage_;
    std::vector<std::pair<int, int>> indices_;
    std::vector<long> slot_;  // (depth+1)^2 table, -1 where not stored
    Eigen::VectorXcd data_;   // 4 entries per stored ADO, column-major 2x2 blocks
};

struct HeomConfig {
    ModelParams model;
    CouplingOperator coupling = coupling_operator(0.0, CouplingKind::PerpendicularZ);
    int depth = 8;
    /// RK4 step; when unset, default_heom_step(model, output_step).
    std::optional<double> step;
    TimeGrid grid{10.0, 0.1};  ///< output grid; the solver step must divide grid.step
    DensityMatrix initial = DensityMatrix::pure(Vector2cd(1.0, 0.0));
    AdoStorage storage = AdoStorage::Symmetric;

    void validate() const;
};

/// 0.01 / max(Delta, gamma, Gamma), shrunk until it divides the output step.
double default_heom_step(const ModelParams& model, double output_step);

/// Time derivative of the whole hierarchy.
AdoHierarchy heom_rhs(const AdoHierarchy& state, const HeomConfig& config);

/// rho^(0,0) sampled on config.grid.  Metadata records depth, step, trace drift,
/// the smallest eigenvalue seen and the conjugate-symmetry residual.
/// Throws NumericalError on hierarchy overflow.
Trajectory<DensityMatrix> heom_propagate(const HeomConfig& config);

struct ConvergenceOptions {
    int initial_depth = 1;
    int depth_increment = 4;
    int max_depth = 40;
    double depth_tolerance = 1e-6;
    double step_tolerance = 1e-8;
    int max_halvings = 6;
};

struct ConvergedHeom {
    Trajectory<DensityMatrix> trajectory;  ///< at the accepted depth and step
    int depth = 0;
    double step = 0.0;
    double depth_delta = 0.0;  ///< sup Bloch distance between depth N and N + increment
    double step_delta = 0.0;   ///< sup Bloch distance between step h and h/2
};

/// Raises N in increments until depth N and N + increment agree to
/// depth_tolerance, then halves h until h and h/2 agree to step_tolerance.
/// config.depth and config.step are ignored.  Throws NumericalError listing the
/// last delta when max_depth or max_halvings is exhausted.
ConvergedHeom heom_converged_propagate(const HeomConfig& config, const ConvergenceOptions& options = {});

}  // namespace qprobe
