#pragma once

#include "meshcrit/hamiltonian.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>

namespace meshcrit {

struct EigenOptions {
    double tol = 1e-12;   ///< residual bound, relative to max(1, |E|)
    int maxiter = 5000;
    int refresh_interval = 50;  ///< recompute H x from scratch and re-project this often
    int block_size = 1;         ///< LOBPCG block; > 1 helps when the lowest levels crowd together
    int fallback_block_size = 8;  ///< wider block used once the first one stalls
};

struct EigenResult {
    double energy = 0.0;
    StateVector vector;
    double residual = 0.0;  ///< ||H v - E v||_2 recomputed from scratch
    int iterations = 0;
    bool converged = false;
    double initial_rayleigh = 0.0;
};

/// Operator-only access used by the solver.
struct OperatorView {
    std::size_t dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
    std::span<const double> diagonal;
    std::function<void(std::span<double>)> project;  ///< optional symmetry projector
    std::function<double(std::span<const double>)> rayleigh;  ///< optional accurate <v,Hv>/<v,v>
};

/// Lowest eigenpair by locally optimal block preconditioned conjugate
/// gradients with a diagonal preconditioner. Only the first column of the
/// block is tested for convergence. When the residual decay observed with
/// `block_size` predicts that `maxiter` will not suffice, the run continues
/// from the current vector with `fallback_block_size`; the iteration count
/// covers both stages.
///
/// Converged means ||H v - E v|| <= tol max(1, |E|) and the last two Rayleigh
/// quotients differ by at most 0.1 tol |E|. Non-convergence is reported in
/// the result; NaN/Inf throws NumericError.
EigenResult lowest_eigenpair(const OperatorView& op, std::span<const double> init, const EigenOptions& options = {});

/// Cold start exp(-(x + y + z)/4) unless `init` is given; projected onto the
/// exchange-symmetric subspace when the operator was built in that mode.
EigenResult lowest_eigenpair(const HamiltonianOperator& h, const StateVector* init = nullptr,
                             const EigenOptions& options = {});

StateVector cold_start_vector(const PerimetricGrid& grid);

struct DensePair {
    double value;
    Eigen::VectorXd vector;
};

/// Smallest eigenvalue by a dense symmetric solver. Throws ResourceError above kDenseLimit.
double dense_lowest(const Eigen::MatrixXd& m);
DensePair dense_lowest_pair(const Eigen::MatrixXd& m);

/// Sum of a[i] * b[i] over fixed 4096-element chunks, combined in chunk order:
/// bit-identical for any thread count.
double reproducible_dot(std::span<const double> a, std::span<const double> b);

} // namespace meshcrit
