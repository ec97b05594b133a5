#pragma once

#include "meshcrit/quadmesh.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace meshcrit {

/// Electron-nucleus and electron-electron distances (atomic units).
struct RadialTriple {
    double r1;
    double r2;
    double r12;
};

/// x = r1 + r12 - r2, y = r2 + r12 - r1, z = r1 + r2 - r12.
/// Electron exchange r1 <-> r2 is the swap x <-> y.
struct PerimetricTriple {
    double x;
    double y;
    double z;
};

/// Mesh sizes and scale parameters; physical nodes along an axis are h * u_i.
struct MeshSpec {
    int nx = 1;
    int ny = 1;
    int nz = 1;
    double hx = 1.0;
    double hy = 1.0;
    double hz = 1.0;

    std::size_t points() const noexcept
    {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    bool exchange_symmetric() const noexcept { return nx == ny && hx == hy; }
    friend bool operator==(const MeshSpec&, const MeshSpec&) = default;
};

/// Throws ConfigError on non-positive sizes or scales, or sizes above the rule limit.
void validate(const MeshSpec& spec);

PerimetricTriple perimetric_from_radial(const RadialTriple& t);
RadialTriple radial_from_perimetric(const PerimetricTriple& p);

/// Inverse metric of the S-state reduction of Delta_1 + Delta_2 in (r1, r2, r12):
/// [[1, 0, c1], [0, 1, c2], [c1, c2, 2]], c1 and c2 the cosines at the vertices of r1 and r2.
Eigen::Matrix3d metric_radial(const RadialTriple& t);

/// A g A^T with A the (constant) Jacobian rows of (x, y, z) w.r.t. (r1, r2, r12).
Eigen::Matrix3d metric_perimetric(const PerimetricTriple& p);

/// r1 r2 r12 = (x + z)(y + z)(x + y) / 8.
double volume_weight(const PerimetricTriple& p);

/// Closed-form J * G^{ab}. The (x, y) entry vanishes identically.
struct WeightedMetric {
    double xx, yy, zz, xz, yz;
};
WeightedMetric weighted_metric(const PerimetricTriple& p);

/// Tensor-product mesh in perimetric coordinates with the volume weight and
/// the J * G^{ab} coefficient tables precomputed at every node. Tables are
/// flat, row-major in (p, q, r), i.e. index (p * ny + q) * nz + r.
class PerimetricGrid {
  public:
    explicit PerimetricGrid(const MeshSpec& spec);

    const MeshSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return spec_.points(); }
    std::size_t index(int p, int q, int r) const noexcept
    {
        return (static_cast<std::size_t>(p) * spec_.ny + q) * spec_.nz + r;
    }

    const LagrangeBasis& basis_x() const noexcept { return bx_; }
    const LagrangeBasis& basis_y() const noexcept { return by_; }
    const LagrangeBasis& basis_z() const noexcept { return bz_; }

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& y() const noexcept { return y_; }
    const std::vector<double>& z() const noexcept { return z_; }

    const std::vector<double>& volume() const noexcept { return jac_; }
    const std::vector<double>& w_xx() const noexcept { return wxx_; }
    const std::vector<double>& w_yy() const noexcept { return wyy_; }
    const std::vector<double>& w_zz() const noexcept { return wzz_; }
    const std::vector<double>& w_xz() const noexcept { return wxz_; }
    const std::vector<double>& w_yz() const noexcept { return wyz_; }

  private:
    MeshSpec spec_;
    LagrangeBasis bx_, by_, bz_;
    std::vector<double> x_, y_, z_;
    std::vector<double> jac_, wxx_, wyy_, wzz_, wxz_, wyz_;
};

PerimetricGrid build_grid(const MeshSpec& spec);

} // namespace meshcrit
