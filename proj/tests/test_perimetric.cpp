#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshcrit/errors.hpp"
#include "meshcrit/perimetric.hpp"
#include "meshcrit/selftest.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace meshcrit;

namespace {

RadialTriple random_triangle(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> d(0.05, 5.0);
    // Perimetric coordinates are free in the octant; map back for a valid triple.
    return radial_from_perimetric({d(rng), d(rng), d(rng)});
}

Eigen::Matrix3d jacobian_rows()
{
    Eigen::Matrix3d a;
    a << 1, -1, 1, -1, 1, 1, 1, 1, -1;
    return a;
}

} // namespace

TEST_CASE("radial to perimetric examples")
{
    const auto p = perimetric_from_radial({1, 1, 1});
    CHECK(p.x == 1.0);
    CHECK(p.y == 1.0);
    CHECK(p.z == 1.0);
    const auto q = perimetric_from_radial({1, 1, 2});
    CHECK(q.x == 2.0);
    CHECK(q.y == 2.0);
    CHECK(q.z == 0.0);
    CHECK_THROWS_AS(perimetric_from_radial({1, 1, 3}), DomainError);
    CHECK_THROWS_AS(perimetric_from_radial({3, 1, 1}), DomainError);
}

TEST_CASE("radial round trip")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(0.05, 5.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const RadialTriple t = random_triangle(rng);
        const RadialTriple back = radial_from_perimetric(perimetric_from_radial(t));
        const double scale = std::max({t.r1, t.r2, t.r12});
        CHECK(std::abs(back.r1 - t.r1) <= 1e-15 * scale);
        CHECK(std::abs(back.r2 - t.r2) <= 1e-15 * scale);
        CHECK(std::abs(back.r12 - t.r12) <= 1e-15 * scale);
    }
}

TEST_CASE("radial metric examples")
{
    const auto g = metric_radial({1, 1, 1});
    CHECK(g(0, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g(2, 2) == 2.0);
    CHECK(g(0, 1) == 0.0);
    CHECK((g - g.transpose()).norm() == 0.0);
    const auto c = metric_radial({1.5, 2.5, 4.0});
    CHECK(c(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c(1, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(metric_radial({0, 1, 1}), DomainError);
    CHECK_THROWS_AS(metric_radial({1, -1, 1}), DomainError);
    CHECK_THROWS_AS(metric_radial({1, 1, 0}), DomainError);
}

TEST_CASE("metric cosines stay in [-1, 1]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto g = metric_radial(random_triangle(rng));
        CHECK(std::abs(g(0, 2)) <= 1.0 + 1e-14);
        CHECK(std::abs(g(1, 2)) <= 1.0 + 1e-14);
    }
}

TEST_CASE("divergence form reproduces the first-order Laplacian terms")
{
    // (1/J) sum_a d_a (J g^{ab}) must equal (2/r1, 2/r2, 4/r12)_b.
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const RadialTriple t = random_triangle(rng);
        const double jac = t.r1 * t.r2 * t.r12;
        auto jg = [](const RadialTriple& s, int a, int b) { return s.r1 * s.r2 * s.r12 * metric_radial(s)(a, b); };
        const double expect[3] = {2.0 / t.r1, 2.0 / t.r2, 4.0 / t.r12};
        for (int b = 0; b < 3; ++b) {
            double div = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double at = a == 0 ? t.r1 : (a == 1 ? t.r2 : t.r12);
                auto f = [&](double v) {
                    RadialTriple s = t;
                    (a == 0 ? s.r1 : (a == 1 ? s.r2 : s.r12)) = v;
                    return jg(s, a, b);
                };
                // Stay inside the triangle while differencing.
                const double room = std::min({perimetric_from_radial(t).x, perimetric_from_radial(t).y,
                                              perimetric_from_radial(t).z, at}) / 4.0;
                div += ridders_derivative(f, at, room);
            }
            CHECK(div / jac == doctest::Approx(expect[b]).epsilon(1e-8));
        }
    }
}

TEST_CASE("perimetric metric examples")
{
    const auto g = metric_perimetric({1, 1, 1});
    CHECK(g(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
    const Eigen::Matrix3d expect = jacobian_rows() * metric_radial({1, 1, 1}) * jacobian_rows().transpose();
    CHECK((g - expect).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(metric_perimetric({1, 0, -1}), DomainError);
}

TEST_CASE("perimetric metric exchange covariance and positivity")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.01, 10.0);
    Eigen::Matrix3d swap;
    swap << 0, 1, 0, 1, 0, 0, 0, 0, 1;
    for (int trial = 0; trial < 1000; ++trial) {
        const PerimetricTriple p{d(rng), d(rng), d(rng)};
        const auto g = metric_perimetric(p);
        const auto gs = metric_perimetric({p.y, p.x, p.z});
        CHECK((swap * g * swap - gs).cwiseAbs().maxCoeff() <= 1e-13 * g.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
        CHECK(es.eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("volume weight examples and identity")
{
    CHECK(volume_weight({1, 1, 1}) == 1.0);
    CHECK(volume_weight({2, 2, 0}) == 2.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.01, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const PerimetricTriple p{d(rng), d(rng), d(rng)};
        const auto t = radial_from_perimetric(p);
        CHECK(volume_weight(p) == doctest::Approx(t.r1 * t.r2 * t.r12).epsilon(1e-15));
    }
}

TEST_CASE("closed-form weighted metric equals J G")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(0.01, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const PerimetricTriple p{d(rng), d(rng), d(rng)};
        const Eigen::Matrix3d jg = volume_weight(p) * metric_perimetric(p);
        const auto w = weighted_metric(p);
        const double scale = jg.cwiseAbs().maxCoeff();
        CHECK(std::abs(w.xx - jg(0, 0)) <= 1e-13 * scale);
        CHECK(std::abs(w.yy - jg(1, 1)) <= 1e-13 * scale);
        CHECK(std::abs(w.zz - jg(2, 2)) <= 1e-13 * scale);
        CHECK(std::abs(w.xz - jg(0, 2)) <= 1e-13 * scale);
        CHECK(std::abs(w.yz - jg(1, 2)) <= 1e-13 * scale);
        CHECK(std::abs(jg(0, 1)) <= 1e-13 * scale);
    }
}

TEST_CASE("mesh spec validation")
{
    CHECK_NOTHROW(validate(MeshSpec{2, 2, 2, 1, 1, 1}));
    CHECK_THROWS_AS(validate(MeshSpec{0, 2, 2, 1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(validate(MeshSpec{2, 2, 201, 1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(validate(MeshSpec{2, 2, 2, 0.0, 1, 1}), ConfigError);
    CHECK_THROWS_AS(validate(MeshSpec{2, 2, 2, 1, -1, 1}), ConfigError);
    CHECK_THROWS_AS(validate(MeshSpec{2, 2, 2, 1, 1, std::nan("")}), ConfigError);
    CHECK_THROWS_AS(PerimetricGrid(MeshSpec{2, 0, 2, 1, 1, 1}), ConfigError);
    CHECK(MeshSpec{3, 3, 2, 0.5, 0.5, 1}.exchange_symmetric());
    CHECK_FALSE(MeshSpec{3, 3, 2, 0.5, 0.6, 1}.exchange_symmetric());
    CHECK_FALSE(MeshSpec{3, 4, 2, 0.5, 0.5, 1}.exchange_symmetric());
}

TEST_CASE("one-point grid")
{
    const PerimetricGrid g(MeshSpec{1, 1, 1, 1, 1, 1});
    REQUIRE(g.size() == 1);
    CHECK(g.x()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.volume()[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid tables equal pointwise formulas")
{
    const MeshSpec spec{2, 3, 4, 0.7, 1.3, 0.4};
    const PerimetricGrid g(spec);
    const auto rx = gauss_laguerre_rule(2), ry = gauss_laguerre_rule(3), rz = gauss_laguerre_rule(4);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 4; ++r) {
                const PerimetricTriple pt{0.7 * rx.nodes[p], 1.3 * ry.nodes[q], 0.4 * rz.nodes[r]};
                const auto idx = g.index(p, q, r);
                CHECK(idx == static_cast<std::size_t>((p * 3 + q) * 4 + r));
                CHECK(g.volume()[idx] == volume_weight(pt));
                const auto w = weighted_metric(pt);
                CHECK(g.w_xx()[idx] == w.xx);
                CHECK(g.w_yy()[idx] == w.yy);
                CHECK(g.w_zz()[idx] == w.zz);
                CHECK(g.w_xz()[idx] == w.xz);
                CHECK(g.w_yz()[idx] == w.yz);
            }
}

TEST_CASE("doubling hz doubles the z nodes exactly")
{
    const PerimetricGrid a(MeshSpec{2, 2, 5, 1, 1, 0.5});
    const PerimetricGrid b(MeshSpec{2, 2, 5, 1, 1, 1.0});
    for (int r = 0; r < 5; ++r)
        CHECK(b.z()[r] == 2.0 * a.z()[r]);
}

TEST_CASE("exchange symmetry of the tables")
{
    const MeshSpec spec{5, 5, 3, 0.9, 0.9, 0.4};
    const PerimetricGrid g(spec);
    for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q)
            for (int r = 0; r < 3; ++r) {
                const auto a = g.index(p, q, r), b = g.index(q, p, r);
                CHECK(g.volume()[a] == g.volume()[b]);
                CHECK(g.w_xx()[a] == g.w_yy()[b]);
                CHECK(g.w_xz()[a] == g.w_yz()[b]);
                CHECK(g.w_zz()[a] == doctest::Approx(g.w_zz()[b]).epsilon(1e-15));
            }
}

TEST_CASE("cosines in range and J positive at all mesh points")
{
    const PerimetricGrid g(MeshSpec{12, 12, 9, 0.8, 0.8, 0.5});
    for (int p = 0; p < 12; ++p)
        for (int q = 0; q < 12; ++q)
            for (int r = 0; r < 9; ++r) {
                const auto m = metric_radial(radial_from_perimetric({g.x()[p], g.y()[q], g.z()[r]}));
                CHECK(std::abs(m(0, 2)) <= 1.0);
                CHECK(std::abs(m(1, 2)) <= 1.0);
                CHECK(g.volume()[g.index(p, q, r)] > 0.0);
            }
}

TEST_CASE("grid construction is deterministic")
{
    const MeshSpec spec{9, 7, 6, 1.1, 0.6, 0.3};
    const auto a = build_grid(spec);
    const auto b = build_grid(spec);
    CHECK(a.volume() == b.volume());
    CHECK(a.w_xx() == b.w_xx());
    CHECK(a.w_xz() == b.w_xz());
    CHECK(a.w_yz() == b.w_yz());
}
