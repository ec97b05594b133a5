// Serial reference paths: a plain loop-nest apply and the dense assembly
// from the collapsed matrix-element formulas.

#include "meshcrit/errors.hpp"
#include "meshcrit/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace meshcrit {

void HamiltonianOperator::apply_serial(std::span<const double> v, std::span<double> out) const
{
    check_dims(v.size(), out.size());
    const auto& s = spec();
    const auto& g = *grid_;
    const auto& tx = axis_[0];
    const auto& ty = axis_[1];
    const auto& tz = axis_[2];
    const std::size_t n = dim();

    std::vector<double> c(n), gx(n, 0.0), gy(n, 0.0), gz(n, 0.0);
    for (std::size_t idx = 0; idx < n; ++idx)
        c[idx] = v[idx] * inv_sqrt_j_[idx];

    for (int p = 0; p < s.nx; ++p)
        for (int q = 0; q < s.ny; ++q)
            for (int r = 0; r < s.nz; ++r) {
                const std::size_t idx = g.index(p, q, r);
                for (int i = 0; i < s.nx; ++i)
                    gx[idx] += tx(p, i) * c[g.index(i, q, r)];
                for (int j = 0; j < s.ny; ++j)
                    gy[idx] += ty(q, j) * c[g.index(p, j, r)];
                for (int k = 0; k < s.nz; ++k)
                    gz[idx] += tz(r, k) * c[g.index(p, q, k)];
            }

    std::vector<double> fx(n), fy(n), fz(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        fx[idx] = 0.5 * (g.w_xx()[idx] * gx[idx] + g.w_xz()[idx] * gz[idx]);
        fy[idx] = 0.5 * (g.w_yy()[idx] * gy[idx] + g.w_yz()[idx] * gz[idx]);
        fz[idx] = 0.5 * (g.w_zz()[idx] * gz[idx] + g.w_xz()[idx] * gx[idx] + g.w_yz()[idx] * gy[idx]);
    }

    for (int i = 0; i < s.nx; ++i)
        for (int j = 0; j < s.ny; ++j)
            for (int k = 0; k < s.nz; ++k) {
                double acc = 0.0;
                for (int p = 0; p < s.nx; ++p)
                    acc += tx(p, i) * fx[g.index(p, j, k)];
                for (int q = 0; q < s.ny; ++q)
                    acc += ty(q, j) * fy[g.index(i, q, k)];
                for (int r = 0; r < s.nz; ++r)
                    acc += tz(r, k) * fz[g.index(i, j, r)];
                const std::size_t idx = g.index(i, j, k);
                out[idx] = acc * inv_sqrt_j_[idx] + potential_[idx] * v[idx];
            }
}

namespace {

using real = long double;

// Oracle tables recomputed in extended precision from the shared 1-D data
// (nodes, weights, derivative matrix) so that small, cancellation-prone
// entries carry ~1e-16 relative error instead of ~1e-13.
struct AxisData {
    std::vector<real> node;                    // h * u_p
    std::vector<std::vector<real>> t;          // t[p][i] = sqrt(lam_p) D(i, p) / h
};

AxisData axis_data(const LagrangeBasis& basis, double h)
{
    const int n = basis.size();
    const auto& rule = basis.rule();
    const auto& d = basis.deriv_matrix();
    AxisData a;
    a.node.resize(static_cast<std::size_t>(n));
    a.t.assign(static_cast<std::size_t>(n), std::vector<real>(static_cast<std::size_t>(n)));
    for (int p = 0; p < n; ++p) {
        a.node[static_cast<std::size_t>(p)] = static_cast<real>(h) * static_cast<real>(rule.nodes[p]);
        const real sl = std::sqrt(static_cast<real>(rule.reg_weights[p]));
        for (int i = 0; i < n; ++i)
            a.t[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] =
                sl * static_cast<real>(d(i, p)) / static_cast<real>(h);
    }
    return a;
}

} // namespace

Eigen::MatrixXd assemble_dense(const HamiltonianOperator& h)
{
    const std::size_t n = h.dim();
    if (n > kDenseLimit)
        throw ResourceError("assemble_dense: " + std::to_string(n) + " points exceeds the limit of " +
                            std::to_string(kDenseLimit));
    const auto& g = h.grid();
    const auto& s = g.spec();
    const AxisData ax = axis_data(g.basis_x(), s.hx);
    const AxisData ay = axis_data(g.basis_y(), s.hy);
    const AxisData az = axis_data(g.basis_z(), s.hz);
    const auto& tx = ax.t;
    const auto& ty = ay.t;
    const auto& tz = az.t;

    std::vector<real> jac(n), wxx(n), wyy(n), wzz(n), wxz(n), wyz(n), pot(n);
    const real zn = h.coupling().nuclear, lam = h.coupling().interelectron;
    for (int p = 0; p < s.nx; ++p)
        for (int q = 0; q < s.ny; ++q)
            for (int r = 0; r < s.nz; ++r) {
                const real x = ax.node[p], y = ay.node[q], z = az.node[r];
                const std::size_t idx = g.index(p, q, r);
                jac[idx] = (x + z) * (y + z) * (x + y) / 8;
                wxx[idx] = x * (x * y + 2 * x * z + y * y + 2 * y * z + 2 * z * z) / 2;
                wyy[idx] = y * (x * x + x * y + 2 * x * z + 2 * y * z + 2 * z * z) / 2;
                wzz[idx] = z * (x * x + x * z + y * y + y * z) / 2;
                wxz[idx] = -x * z * (x + z) / 2;
                wyz[idx] = -y * z * (y + z) / 2;
                pot[idx] = -zn * (2 / (x + z) + 2 / (y + z)) + lam * 2 / (x + y);
            }

    std::vector<real> acc_row(n);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (int i = 0; i < s.nx; ++i)
        for (int j = 0; j < s.ny; ++j)
            for (int k = 0; k < s.nz; ++k) {
                const std::size_t row = g.index(i, j, k);
                std::fill(acc_row.begin(), acc_row.end(), real(0));
                // (x, x): delta_jj' delta_kk' 1/2 sum_p T_x[p][i] T_x[p][i'] W_xx[p][j][k]
                for (int i2 = 0; i2 < s.nx; ++i2) {
                    real acc = 0;
                    for (int p = 0; p < s.nx; ++p)
                        acc += tx[p][i] * tx[p][i2] * wxx[g.index(p, j, k)];
                    acc_row[g.index(i2, j, k)] += acc / 2;
                }
                for (int j2 = 0; j2 < s.ny; ++j2) {
                    real acc = 0;
                    for (int q = 0; q < s.ny; ++q)
                        acc += ty[q][j] * ty[q][j2] * wyy[g.index(i, q, k)];
                    acc_row[g.index(i, j2, k)] += acc / 2;
                }
                for (int k2 = 0; k2 < s.nz; ++k2) {
                    real acc = 0;
                    for (int r = 0; r < s.nz; ++r)
                        acc += tz[r][k] * tz[r][k2] * wzz[g.index(i, j, r)];
                    acc_row[g.index(i, j, k2)] += acc / 2;
                }
                // (x, z) and its transpose partner: delta_jj'.
                for (int i2 = 0; i2 < s.nx; ++i2)
                    for (int k2 = 0; k2 < s.nz; ++k2)
                        acc_row[g.index(i2, j, k2)] += (tx[i2][i] * tz[k][k2] * wxz[g.index(i2, j, k)] +
                                                        tz[k2][k] * tx[i][i2] * wxz[g.index(i, j, k2)]) / 2;
                // (y, z) and partner: delta_ii'.
                for (int j2 = 0; j2 < s.ny; ++j2)
                    for (int k2 = 0; k2 < s.nz; ++k2)
                        acc_row[g.index(i, j2, k2)] += (ty[j2][j] * tz[k][k2] * wyz[g.index(i, j2, k)] +
                                                        tz[k2][k] * ty[j][j2] * wyz[g.index(i, j, k2)]) / 2;
                for (std::size_t col = 0; col < n; ++col) {
                    real v = acc_row[col] / std::sqrt(jac[row] * jac[col]);
                    if (col == row)
                        v += pot[row];
                    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = static_cast<double>(v);
                }
            }
    return m;
}

} // namespace meshcrit
