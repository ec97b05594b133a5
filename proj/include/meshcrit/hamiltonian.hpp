#pragma once

#include "meshcrit/perimetric.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace meshcrit {

/// Coefficients C[i][j][k] on the product mesh after the overlap similarity,
/// stored row-major in (i, j, k).
struct StateVector {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    std::vector<double> values;

    StateVector() = default;
    StateVector(int nx_, int ny_, int nz_, double fill = 0.0)
        : nx(nx_), ny(ny_), nz(nz_), values(static_cast<std::size_t>(nx_) * ny_ * nz_, fill)
    {
    }
    explicit StateVector(const MeshSpec& spec, double fill = 0.0)
        : StateVector(spec.nx, spec.ny, spec.nz, fill)
    {
    }

    std::size_t size() const noexcept { return values.size(); }
    std::size_t index(int i, int j, int k) const noexcept
    {
        return (static_cast<std::size_t>(i) * ny + j) * nz + k;
    }
    double& operator()(int i, int j, int k) { return values[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values[index(i, j, k)]; }
    bool same_shape(const StateVector& o) const noexcept { return nx == o.nx && ny == o.ny && nz == o.nz; }
};

/// Potential -nuclear (1/r1 + 1/r2) + interelectron / r12.
/// The scaled problem uses {1, lambda}; the unscaled one {Z, 1}.
struct Coupling {
    double nuclear = 1.0;
    double interelectron = 1.0;
};

struct HamiltonianOptions {
    /// Require Nx = Ny and hx = hy so the operator commutes with electron exchange.
    bool exchange_symmetric = false;
};

/// Mesh Hamiltonian in Gauss approximation after the diagonal similarity
/// S^{-1/2} (K + S V) S^{-1/2}, S = diag(J). The kinetic part is kept in
/// factored form: per-axis matrices T_a[p][i] = sqrt(lam_p) f_i'(u_p) / h_a and
/// the J G^{ab} tables of the grid, so
///
///   K = 1/2 sum_{a,b} T_a^T diag(W^{ab}) T_b.
class HamiltonianOperator {
  public:
    HamiltonianOperator(std::shared_ptr<const PerimetricGrid> grid, Coupling coupling,
                        HamiltonianOptions options = {});

    /// Same grid and kinetic factors, new potential.
    HamiltonianOperator with_coupling(Coupling coupling) const;

    const PerimetricGrid& grid() const noexcept { return *grid_; }
    std::shared_ptr<const PerimetricGrid> grid_ptr() const noexcept { return grid_; }
    const MeshSpec& spec() const noexcept { return grid_->spec(); }
    const Coupling& coupling() const noexcept { return coupling_; }
    const HamiltonianOptions& options() const noexcept { return options_; }
    std::size_t dim() const noexcept { return grid_->size(); }

    /// Interelectron coupling of the scaled form (lambda = 1/Z).
    double lambda() const noexcept { return coupling_.interelectron / coupling_.nuclear; }

    /// out = H v. OpenMP-parallel; every output entry is produced by one
    /// thread in a fixed order, so results do not depend on the thread count.
    void apply(std::span<const double> v, std::span<double> out) const;
    StateVector apply(const StateVector& v) const;

    /// Straight loop-nest version of apply, kept as the reference for tests and benchmarks.
    void apply_serial(std::span<const double> v, std::span<double> out) const;

    /// <v, H v> / <v, v> evaluated in gradient form,
    /// 1/2 sum W^{ab} G_a G_b + sum V v^2, whose summands carry no large
    /// cancellations; accurate to a few ulp of the energy rather than of ||H||.
    double rayleigh_quotient(std::span<const double> v) const;

    const std::vector<double>& potential() const noexcept { return potential_; }
    const std::vector<double>& diagonal() const noexcept { return diagonal_; }

    /// T_a as an n_a x n_a matrix, rows indexed by mesh point p, columns by basis index i.
    const Eigen::MatrixXd& axis_matrix(int axis) const { return axis_.at(static_cast<std::size_t>(axis)); }
    const std::vector<double>& inv_sqrt_volume() const noexcept { return inv_sqrt_j_; }

  private:
    HamiltonianOperator(std::shared_ptr<const PerimetricGrid> grid, Coupling coupling,
                        HamiltonianOptions options, std::vector<Eigen::MatrixXd> axis,
                        std::vector<double> inv_sqrt_j, std::vector<double> kinetic_diag);

    void check_dims(std::size_t in, std::size_t out) const;
    void finish_build();

    std::shared_ptr<const PerimetricGrid> grid_;
    Coupling coupling_;
    HamiltonianOptions options_;
    std::vector<Eigen::MatrixXd> axis_;  // row-major storage not needed: n <= 200
    std::vector<double> inv_sqrt_j_;
    std::vector<double> kinetic_diag_;
    std::vector<double> potential_;
    std::vector<double> diagonal_;
};

std::vector<double> build_potential(const PerimetricGrid& grid, Coupling coupling);

/// -2/(x+z) - 2/(y+z) + 2 lambda/(x+y) at every node.
std::vector<double> build_potential(const PerimetricGrid& grid, double lambda);

/// Scaled Hamiltonian -1/2 (Delta_1 + Delta_2) - 1/r1 - 1/r2 + lambda/r12.
HamiltonianOperator build_hamiltonian(const MeshSpec& spec, double lambda, HamiltonianOptions options = {});

/// Unscaled Hamiltonian with nuclear charge Z; exists for the scaling identity.
HamiltonianOperator build_unscaled_hamiltonian(const MeshSpec& spec, double charge,
                                               HamiltonianOptions options = {});

inline constexpr std::size_t kDenseLimit = 4096;

/// Explicit matrix from the collapsed matrix-element formulas (independent of
/// the factored apply). Throws ResourceError above kDenseLimit points.
Eigen::MatrixXd assemble_dense(const HamiltonianOperator& h);

/// v[i][j][k] -> v[j][i][k]. Throws ConfigError if nx != ny.
StateVector exchange_permute(const StateVector& v);

/// (v + Pv) / 2. Throws ConfigError if nx != ny.
StateVector exchange_project(const StateVector& v);

/// In-place form on a raw buffer with the given shape.
void exchange_project_inplace(std::span<double> v, int nx, int ny, int nz);

} // namespace meshcrit
