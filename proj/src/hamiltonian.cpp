#include "meshcrit/hamiltonian.hpp"

#include "meshcrit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace meshcrit {

namespace {

Eigen::MatrixXd scaled_axis_matrix(const LagrangeBasis& basis, double h)
{
    const int n = basis.size();
    const auto& lam = basis.rule().reg_weights;
    const auto& d = basis.deriv_matrix();
    Eigen::MatrixXd t(n, n);
    for (int p = 0; p < n; ++p)
        for (int i = 0; i < n; ++i)
            t(p, i) = std::sqrt(lam[p]) * d(i, p) / h;
    return t;
}

} // namespace

std::vector<double> build_potential(const PerimetricGrid& grid, Coupling coupling)
{
    const auto& s = grid.spec();
    std::vector<double> v(grid.size());
#pragma omp parallel for schedule(static)
    for (int p = 0; p < s.nx; ++p) {
        for (int q = 0; q < s.ny; ++q) {
            for (int r = 0; r < s.nz; ++r) {
                const double x = grid.x()[p], y = grid.y()[q], z = grid.z()[r];
                v[grid.index(p, q, r)] = -coupling.nuclear * (2.0 / (x + z) + 2.0 / (y + z)) +
                                         coupling.interelectron * 2.0 / (x + y);
            }
        }
    }
    return v;
}

std::vector<double> build_potential(const PerimetricGrid& grid, double lambda)
{
    return build_potential(grid, Coupling{1.0, lambda});
}

HamiltonianOperator::HamiltonianOperator(std::shared_ptr<const PerimetricGrid> grid, Coupling coupling,
                                         HamiltonianOptions options)
    : grid_(std::move(grid)), coupling_(coupling), options_(options)
{
    if (!grid_)
        throw std::invalid_argument("HamiltonianOperator: null grid");
    const auto& s = grid_->spec();
    if (options_.exchange_symmetric && !s.exchange_symmetric())
        throw ConfigError("exchange-symmetric mode requires nx == ny and hx == hy");

    axis_.push_back(scaled_axis_matrix(grid_->basis_x(), s.hx));
    axis_.push_back(scaled_axis_matrix(grid_->basis_y(), s.hy));
    axis_.push_back(scaled_axis_matrix(grid_->basis_z(), s.hz));

    const std::size_t n = grid_->size();
    inv_sqrt_j_.resize(n);
    kinetic_diag_.resize(n);
    const auto& jac = grid_->volume();
    const auto& tx = axis_[0];
    const auto& ty = axis_[1];
    const auto& tz = axis_[2];

#pragma omp parallel for schedule(static)
    for (int i = 0; i < s.nx; ++i) {
        for (int j = 0; j < s.ny; ++j) {
            for (int k = 0; k < s.nz; ++k) {
                double sum = 0.0;
                for (int p = 0; p < s.nx; ++p)
                    sum += tx(p, i) * tx(p, i) * grid_->w_xx()[grid_->index(p, j, k)];
                for (int q = 0; q < s.ny; ++q)
                    sum += ty(q, j) * ty(q, j) * grid_->w_yy()[grid_->index(i, q, k)];
                for (int r = 0; r < s.nz; ++r)
                    sum += tz(r, k) * tz(r, k) * grid_->w_zz()[grid_->index(i, j, r)];
                const std::size_t idx = grid_->index(i, j, k);
                const double cross =
                    tx(i, i) * tz(k, k) * grid_->w_xz()[idx] + ty(j, j) * tz(k, k) * grid_->w_yz()[idx];
                kinetic_diag_[idx] = (0.5 * sum + cross) / jac[idx];
                inv_sqrt_j_[idx] = 1.0 / std::sqrt(jac[idx]);
            }
        }
    }
    finish_build();
}

HamiltonianOperator::HamiltonianOperator(std::shared_ptr<const PerimetricGrid> grid, Coupling coupling,
                                         HamiltonianOptions options, std::vector<Eigen::MatrixXd> axis,
                                         std::vector<double> inv_sqrt_j, std::vector<double> kinetic_diag)
    : grid_(std::move(grid)),
      coupling_(coupling),
      options_(options),
      axis_(std::move(axis)),
      inv_sqrt_j_(std::move(inv_sqrt_j)),
      kinetic_diag_(std::move(kinetic_diag))
{
    finish_build();
}

void HamiltonianOperator::finish_build()
{
    potential_ = build_potential(*grid_, coupling_);
    diagonal_.resize(potential_.size());
    for (std::size_t i = 0; i < potential_.size(); ++i)
        diagonal_[i] = kinetic_diag_[i] + potential_[i];
}

HamiltonianOperator HamiltonianOperator::with_coupling(Coupling coupling) const
{
    return HamiltonianOperator(grid_, coupling, options_, axis_, inv_sqrt_j_, kinetic_diag_);
}

void HamiltonianOperator::check_dims(std::size_t in, std::size_t out) const
{
    if (in != dim() || out != dim())
        throw std::invalid_argument("HamiltonianOperator::apply: dimension mismatch (operator " +
                                    std::to_string(dim()) + ", input " + std::to_string(in) + ", output " +
                                    std::to_string(out) + ")");
}

StateVector HamiltonianOperator::apply(const StateVector& v) const
{
    const auto& s = spec();
    if (v.nx != s.nx || v.ny != s.ny || v.nz != s.nz)
        throw std::invalid_argument("HamiltonianOperator::apply: state shape does not match mesh");
    StateVector out(s);
    apply(v.values, out.values);
    return out;
}

// Kernel layout: index (p * ny + q) * nz + r. Axis x acts on slabs of
// length ny * nz, axis y on rows of length nz inside a slab, axis z on rows.
void HamiltonianOperator::apply(std::span<const double> v, std::span<double> out) const
{
    check_dims(v.size(), out.size());
    const auto& s = spec();
    const int nx = s.nx, ny = s.ny, nz = s.nz;
    const std::size_t n = dim();
    const std::size_t slab = static_cast<std::size_t>(ny) * nz;
    const auto& tx = axis_[0];
    const auto& ty = axis_[1];
    const auto& tz = axis_[2];
    const auto& g = *grid_;
    const double* wxx = g.w_xx().data();
    const double* wyy = g.w_yy().data();
    const double* wzz = g.w_zz().data();
    const double* wxz = g.w_xz().data();
    const double* wyz = g.w_yz().data();
    const double* isj = inv_sqrt_j_.data();
    const double* pot = potential_.data();

    thread_local std::vector<double> work;
    work.resize(6 * n);
    double* c = work.data();
    double* gx = c + n;
    double* gy = gx + n;
    double* gz = gy + n;
    double* fx = gz + n;
    double* fy = fx + n;
    double* fz = c;  // c is dead once the gradients exist
    const double* vin = v.data();
    double* res = out.data();

#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (std::size_t idx = 0; idx < n; ++idx)
            c[idx] = vin[idx] * isj[idx];

        // Gradients: gx = T_x c, gy = T_y c, gz = T_z c.
#pragma omp for schedule(static)
        for (int p = 0; p < nx; ++p) {
            double* gxs = gx + p * slab;
            double* gys = gy + p * slab;
            double* gzs = gz + p * slab;
            const double* cs = c + p * slab;
            for (std::size_t t = 0; t < slab; ++t)
                gxs[t] = 0.0;
            for (int i = 0; i < nx; ++i) {
                const double a = tx(p, i);
                const double* ci = c + i * slab;
                for (std::size_t t = 0; t < slab; ++t)
                    gxs[t] += a * ci[t];
            }
            for (int q = 0; q < ny; ++q) {
                double* row = gys + static_cast<std::size_t>(q) * nz;
                for (int r = 0; r < nz; ++r)
                    row[r] = 0.0;
                for (int j = 0; j < ny; ++j) {
                    const double a = ty(q, j);
                    const double* cj = cs + static_cast<std::size_t>(j) * nz;
                    for (int r = 0; r < nz; ++r)
                        row[r] += a * cj[r];
                }
            }
            for (int q = 0; q < ny; ++q) {
                double* row = gzs + static_cast<std::size_t>(q) * nz;
                const double* crow = cs + static_cast<std::size_t>(q) * nz;
                for (int r = 0; r < nz; ++r)
                    row[r] = 0.0;
                for (int k = 0; k < nz; ++k) {
                    const double ck = crow[k];
                    const double* col = tz.col(k).data();
                    for (int r = 0; r < nz; ++r)
                        row[r] += col[r] * ck;
                }
            }
        }

        // Fluxes F_a = 1/2 sum_b W^{ab} G_b (the xy coefficient is zero).
#pragma omp for schedule(static)
        for (std::size_t idx = 0; idx < n; ++idx) {
            const double ax = gx[idx], ay = gy[idx], az = gz[idx];
            fx[idx] = 0.5 * (wxx[idx] * ax + wxz[idx] * az);
            fy[idx] = 0.5 * (wyy[idx] * ay + wyz[idx] * az);
            fz[idx] = 0.5 * (wzz[idx] * az + wxz[idx] * ax + wyz[idx] * ay);
        }

        // Divergence: out = T_x^T fx + T_y^T fy + T_z^T fz, then undo the similarity.
#pragma omp for schedule(static)
        for (int i = 0; i < nx; ++i) {
            double* os = res + i * slab;
            const double* fys = fy + i * slab;
            const double* fzs = fz + i * slab;
            for (std::size_t t = 0; t < slab; ++t)
                os[t] = 0.0;
            for (int p = 0; p < nx; ++p) {
                const double a = tx(p, i);
                const double* fp = fx + p * slab;
                for (std::size_t t = 0; t < slab; ++t)
                    os[t] += a * fp[t];
            }
            for (int j = 0; j < ny; ++j) {
                double* row = os + static_cast<std::size_t>(j) * nz;
                for (int q = 0; q < ny; ++q) {
                    const double a = ty(q, j);
                    const double* fq = fys + static_cast<std::size_t>(q) * nz;
                    for (int r = 0; r < nz; ++r)
                        row[r] += a * fq[r];
                }
            }
            for (int j = 0; j < ny; ++j) {
                double* row = os + static_cast<std::size_t>(j) * nz;
                const double* frow = fzs + static_cast<std::size_t>(j) * nz;
                for (int k = 0; k < nz; ++k) {
                    const double* col = tz.col(k).data();
                    double acc = 0.0;
                    for (int r = 0; r < nz; ++r)
                        acc += col[r] * frow[r];
                    row[k] += acc;
                }
            }
            for (std::size_t t = 0; t < slab; ++t) {
                const std::size_t idx = i * slab + t;
                os[t] = os[t] * isj[idx] + pot[idx] * vin[idx];
            }
        }
    }
}

double HamiltonianOperator::rayleigh_quotient(std::span<const double> v) const
{
    check_dims(v.size(), v.size());
    const auto& s = spec();
    const int nx = s.nx, ny = s.ny, nz = s.nz;
    const std::size_t slab = static_cast<std::size_t>(ny) * nz;
    const auto& tx = axis_[0];
    const auto& ty = axis_[1];
    const auto& tz = axis_[2];
    const auto& g = *grid_;

    // Each slab p contributes a partial sum; slabs are combined in order.
    std::vector<double> partial(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> norm_part(static_cast<std::size_t>(nx), 0.0);
#pragma omp parallel
    {
        std::vector<double> gx(slab), gy(slab), gz(slab);
#pragma omp for schedule(static)
        for (int p = 0; p < nx; ++p) {
            std::fill(gx.begin(), gx.end(), 0.0);
            std::fill(gy.begin(), gy.end(), 0.0);
            std::fill(gz.begin(), gz.end(), 0.0);
            for (int i = 0; i < nx; ++i) {
                const double a = tx(p, i);
                for (std::size_t t = 0; t < slab; ++t) {
                    const std::size_t idx = i * slab + t;
                    gx[t] += a * v[idx] * inv_sqrt_j_[idx];
                }
            }
            for (int q = 0; q < ny; ++q)
                for (int j = 0; j < ny; ++j) {
                    const double a = ty(q, j);
                    for (int r = 0; r < nz; ++r) {
                        const std::size_t idx = p * slab + static_cast<std::size_t>(j) * nz + r;
                        gy[static_cast<std::size_t>(q) * nz + r] += a * v[idx] * inv_sqrt_j_[idx];
                    }
                }
            for (int q = 0; q < ny; ++q)
                for (int k = 0; k < nz; ++k) {
                    const std::size_t idx = p * slab + static_cast<std::size_t>(q) * nz + k;
                    const double ck = v[idx] * inv_sqrt_j_[idx];
                    const double* col = tz.col(k).data();
                    for (int r = 0; r < nz; ++r)
                        gz[static_cast<std::size_t>(q) * nz + r] += col[r] * ck;
                }
            double e = 0.0, nn = 0.0;
            for (std::size_t t = 0; t < slab; ++t) {
                const std::size_t idx = p * slab + t;
                const double ax = gx[t], ay = gy[t], az = gz[t];
                e += 0.5 * (g.w_xx()[idx] * ax * ax + g.w_yy()[idx] * ay * ay + g.w_zz()[idx] * az * az) +
                     g.w_xz()[idx] * ax * az + g.w_yz()[idx] * ay * az + potential_[idx] * v[idx] * v[idx];
                nn += v[idx] * v[idx];
            }
            partial[static_cast<std::size_t>(p)] = e;
            norm_part[static_cast<std::size_t>(p)] = nn;
        }
    }
    double e = 0.0, nn = 0.0;
    for (int p = 0; p < nx; ++p) {
        e += partial[static_cast<std::size_t>(p)];
        nn += norm_part[static_cast<std::size_t>(p)];
    }
    return e / nn;
}

StateVector exchange_permute(const StateVector& v)
{
    if (v.nx != v.ny)
        throw ConfigError("exchange_permute requires nx == ny");
    StateVector out(v.nx, v.ny, v.nz);
    for (int i = 0; i < v.nx; ++i)
        for (int j = 0; j < v.ny; ++j)
            for (int k = 0; k < v.nz; ++k)
                out(j, i, k) = v(i, j, k);
    return out;
}

void exchange_project_inplace(std::span<double> v, int nx, int ny, int nz)
{
    if (nx != ny)
        throw ConfigError("exchange_project requires nx == ny");
    if (v.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw std::invalid_argument("exchange_project: buffer size does not match shape");
    auto at = [&](int i, int j, int k) -> double& { return v[(static_cast<std::size_t>(i) * ny + j) * nz + k]; };
    for (int i = 0; i < nx; ++i) {
        for (int j = i + 1; j < ny; ++j) {
            for (int k = 0; k < nz; ++k) {
                const double m = 0.5 * (at(i, j, k) + at(j, i, k));
                at(i, j, k) = m;
                at(j, i, k) = m;
            }
        }
    }
}

StateVector exchange_project(const StateVector& v)
{
    StateVector out = v;
    exchange_project_inplace(out.values, out.nx, out.ny, out.nz);
    return out;
}

HamiltonianOperator build_hamiltonian(const MeshSpec& spec, double lambda, HamiltonianOptions options)
{
    return HamiltonianOperator(std::make_shared<const PerimetricGrid>(spec), Coupling{1.0, lambda}, options);
}

HamiltonianOperator build_unscaled_hamiltonian(const MeshSpec& spec, double charge, HamiltonianOptions options)
{
    return HamiltonianOperator(std::make_shared<const PerimetricGrid>(spec), Coupling{charge, 1.0}, options);
}

} // namespace meshcrit
