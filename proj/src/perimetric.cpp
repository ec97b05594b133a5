#include "meshcrit/perimetric.hpp"

#include "meshcrit/errors.hpp"

#include <cmath>
#include <string>

namespace meshcrit {

void validate(const MeshSpec& spec)
{
    auto bad_size = [](int n) { return n < 1 || n > kMaxRulePoints; };
    if (bad_size(spec.nx) || bad_size(spec.ny) || bad_size(spec.nz))
        throw ConfigError("mesh sizes must lie in [1, " + std::to_string(kMaxRulePoints) + "]");
    auto bad_scale = [](double h) { return !(h > 0.0) || !std::isfinite(h); };
    if (bad_scale(spec.hx) || bad_scale(spec.hy) || bad_scale(spec.hz))
        throw ConfigError("mesh scale parameters must be positive and finite");
}

PerimetricTriple perimetric_from_radial(const RadialTriple& t)
{
    const double x = t.r1 + t.r12 - t.r2;
    const double y = t.r2 + t.r12 - t.r1;
    const double z = t.r1 + t.r2 - t.r12;
    // Allow rounding-level violations on the collinear boundary.
    const double tol = 1e-14 * (std::abs(t.r1) + std::abs(t.r2) + std::abs(t.r12));
    if (t.r1 < 0 || t.r2 < 0 || t.r12 < 0 || x < -tol || y < -tol || z < -tol)
        throw DomainError("perimetric_from_radial: triangle inequality violated");
    return {std::max(x, 0.0), std::max(y, 0.0), std::max(z, 0.0)};
}

RadialTriple radial_from_perimetric(const PerimetricTriple& p)
{
    return {0.5 * (p.x + p.z), 0.5 * (p.y + p.z), 0.5 * (p.x + p.y)};
}

Eigen::Matrix3d metric_radial(const RadialTriple& t)
{
    if (!(t.r1 > 0.0) || !(t.r2 > 0.0) || !(t.r12 > 0.0))
        throw DomainError("metric_radial: distances must be positive");
    const double c1 = (t.r1 * t.r1 + t.r12 * t.r12 - t.r2 * t.r2) / (2.0 * t.r1 * t.r12);
    const double c2 = (t.r2 * t.r2 + t.r12 * t.r12 - t.r1 * t.r1) / (2.0 * t.r2 * t.r12);
    Eigen::Matrix3d g;
    g << 1.0, 0.0, c1,
         0.0, 1.0, c2,
         c1, c2, 2.0;
    return g;
}

Eigen::Matrix3d metric_perimetric(const PerimetricTriple& p)
{
    Eigen::Matrix3d a;
    a << 1.0, -1.0, 1.0,
        -1.0, 1.0, 1.0,
         1.0, 1.0, -1.0;
    const Eigen::Matrix3d g = metric_radial(radial_from_perimetric(p));
    return a * g * a.transpose();
}

double volume_weight(const PerimetricTriple& p)
{
    return (p.x + p.z) * (p.y + p.z) * (p.x + p.y) / 8.0;
}

WeightedMetric weighted_metric(const PerimetricTriple& p)
{
    const double x = p.x, y = p.y, z = p.z;
    return {
        0.5 * x * (x * y + 2.0 * x * z + y * y + 2.0 * y * z + 2.0 * z * z),
        0.5 * y * (y * x + 2.0 * y * z + x * x + 2.0 * x * z + 2.0 * z * z),  // mirror of xx
        0.5 * z * (x * x + x * z + y * y + y * z),
        -0.5 * x * z * (x + z),
        -0.5 * y * z * (y + z),
    };
}

namespace {

const MeshSpec& checked(const MeshSpec& spec)
{
    validate(spec);
    return spec;
}

LagrangeBasis make_basis(int n) { return LagrangeBasis(gauss_laguerre_rule(n)); }

std::vector<double> scaled_nodes(const LagrangeBasis& b, double h)
{
    std::vector<double> out(b.rule().nodes);
    for (auto& v : out)
        v *= h;
    return out;
}

} // namespace

PerimetricGrid::PerimetricGrid(const MeshSpec& spec)
    : spec_(checked(spec)),
      bx_(make_basis(spec.nx)),
      by_(spec.ny == spec.nx ? bx_ : make_basis(spec.ny)),
      bz_(make_basis(spec.nz)),
      x_(scaled_nodes(bx_, spec.hx)),
      y_(scaled_nodes(by_, spec.hy)),
      z_(scaled_nodes(bz_, spec.hz))
{
    const std::size_t n = size();
    jac_.resize(n);
    wxx_.resize(n);
    wyy_.resize(n);
    wzz_.resize(n);
    wxz_.resize(n);
    wyz_.resize(n);

#pragma omp parallel for schedule(static)
    for (int p = 0; p < spec_.nx; ++p) {
        for (int q = 0; q < spec_.ny; ++q) {
            for (int r = 0; r < spec_.nz; ++r) {
                const PerimetricTriple pt{x_[p], y_[q], z_[r]};
                const std::size_t idx = index(p, q, r);
                const auto w = weighted_metric(pt);
                jac_[idx] = volume_weight(pt);
                wxx_[idx] = w.xx;
                wyy_[idx] = w.yy;
                wzz_[idx] = w.zz;
                wxz_[idx] = w.xz;
                wyz_[idx] = w.yz;
            }
        }
    }
}

PerimetricGrid build_grid(const MeshSpec& spec) { return PerimetricGrid(spec); }

} // namespace meshcrit
