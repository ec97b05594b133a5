#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshcrit/critical.hpp"
#include "meshcrit/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace meshcrit;

namespace {

ScaledEnergyFunction synthetic(double (*g)(double), int* calls = nullptr)
{
    return [g, calls](double lambda) {
        if (calls)
            ++*calls;
        return CriticalEvaluation{lambda, g(lambda) - 0.5, 0.0, 1, true};
    };
}

double linear(double l) { return l - 1.1; }
double curved(double l) { return std::expm1(3.0 * (l - 1.0976)) * (1.0 + 4.0 * (l - 1.05) * (l - 1.05)); }
// Hockey stick: linear below the root, almost flat above it.
double kinked(double l) { return l < 1.0977 ? 0.25 * (l - 1.0977) : 1e-4 * (l - 1.0977) + 1e-12; }

} // namespace

TEST_CASE("threshold energy")
{
    CHECK(threshold_energy(1.0) == -0.5);
    CHECK(threshold_energy(2.0) == -2.0);
    CHECK(threshold_energy(kReferenceCriticalCharge) == doctest::Approx(-0.414986212532679).epsilon(1e-15));
    CHECK(std::abs(threshold_energy(kReferenceCriticalCharge) + 0.414986212532679) <= 5e-16);
    CHECK_THROWS_AS(threshold_energy(0.0), std::invalid_argument);
    CHECK_THROWS_AS(threshold_energy(-1.0), std::invalid_argument);
}

TEST_CASE("stabilized digits")
{
    CHECK(stabilized_digits(-0.527751016544377, -0.527751016544380) == 14);
    CHECK(stabilized_digits(-0.5, -0.5) == 15);
    CHECK(stabilized_digits(-0.52, -0.53) == 1);
    CHECK(stabilized_digits(0.1, 0.9) == 0);
    CHECK(stabilized_digits(std::nan(""), 1.0) == 0);
}

TEST_CASE("default mesh schedule")
{
    CHECK(default_scales(1.0) == std::array<double, 3>{0.8, 0.8, 0.5});
    CHECK(default_scales(0.99) == std::array<double, 3>{0.8, 0.8, 0.5});
    CHECK(default_scales(0.95) == std::array<double, 3>{1.0, 1.0, 0.5});
    CHECK(default_scales(0.93) == std::array<double, 3>{1.0, 1.0, 0.5});
    CHECK(default_scales(0.92) == std::array<double, 3>{1.0, 1.0, 0.6});
    CHECK(default_scales(0.915) == std::array<double, 3>{1.0, 1.0, 0.6});
    CHECK(default_scales(0.911) == std::array<double, 3>{2.4, 2.4, 0.4});
    const auto m = default_mesh(0.95);
    CHECK(m == MeshSpec{40, 40, 30, 1.0, 1.0, 0.5});
}

TEST_CASE("synthetic linear root")
{
    CriticalOptions o;
    o.tol_ionization = 1e-300;
    const auto r = find_critical_charge(synthetic(linear), o);
    CHECK(r.converged);
    CHECK(std::abs(r.lambda_critical - 1.1) <= o.tol_lambda);
    CHECK(r.z_critical * r.lambda_critical == doctest::Approx(1.0).epsilon(1e-16));
    CHECK(r.threshold_energy == -0.5 * r.z_critical * r.z_critical);
}

TEST_CASE("returned root has the smallest |g| in the history")
{
    for (auto g : {linear, curved, kinked}) {
        CriticalOptions o;
        const auto r = find_critical_charge(synthetic(g), o);
        CHECK(r.converged);
        CHECK(std::abs(r.final_ionization) <= o.tol_ionization);
        for (const auto& e : r.history)
            CHECK(std::abs(r.energy_scaled + 0.5) <= std::abs(e.energy_scaled + 0.5));
        CHECK(r.energy == doctest::Approx(r.z_critical * r.z_critical * r.energy_scaled).epsilon(1e-16));
    }
}

TEST_CASE("kinked function converges within the evaluation budget")
{
    int calls = 0;
    CriticalOptions o;
    const auto r = find_critical_charge(synthetic(kinked, &calls), o);
    CHECK(r.converged);
    CHECK(calls <= o.max_evaluations);
    // Above the kink |g| <= 1e-11 holds for a window of about 9e-8.
    CHECK(std::abs(kinked(r.lambda_critical)) <= o.tol_ionization);
    CHECK(std::abs(r.lambda_critical - 1.0977) <= 1e-7);
}

TEST_CASE("coarse tolerance needs fewer evaluations")
{
    int coarse = 0, fine = 0;
    CriticalOptions o;
    o.tol_ionization = 1e-6;
    find_critical_charge(synthetic(curved, &coarse), o);
    o.tol_ionization = 1e-11;
    find_critical_charge(synthetic(curved, &fine), o);
    CHECK(coarse < fine);
}

TEST_CASE("no sign change is a bracket error")
{
    CriticalOptions o;
    o.lambda_lo = 1.3;
    o.lambda_hi = 1.4;
    CHECK_THROWS_AS(find_critical_charge(synthetic(linear), o), BracketError);
    o.lambda_lo = 1.2;
    o.lambda_hi = 1.1;
    CHECK_THROWS_AS(find_critical_charge(synthetic(linear), o), std::invalid_argument);
}

TEST_CASE("solver failure aborts with a partial history")
{
    int calls = 0;
    ScaledEnergyFunction f = [&](double lambda) {
        ++calls;
        return CriticalEvaluation{lambda, lambda - 1.6, 1.0, 5000, calls < 3};
    };
    const auto r = find_critical_charge(f, CriticalOptions{});
    CHECK(r.solver_failed);
    CHECK_FALSE(r.converged);
    CHECK(r.history.size() == 3);
}

TEST_CASE("energy record identities")
{
    const MeshSpec spec{8, 8, 6, 1.0, 1.0, 0.5};
    const auto rec = ground_state_energy(spec, 0.95, nullptr);
    CHECK(rec.converged);
    CHECK(rec.Z == 0.95);
    CHECK(rec.lambda == 1.0 / 0.95);
    CHECK(rec.energy == 0.95 * 0.95 * rec.energy_scaled);
    CHECK(rec.ionization == rec.energy + 0.5 * 0.95 * 0.95);
    CHECK(rec.wall_time_seconds >= 0.0);
    CHECK(ionization_energy(spec, 0.95) == rec.ionization);
    CHECK_THROWS_AS(ground_state_energy(spec, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ground_state_energy_scaled(spec, -0.1), std::invalid_argument);
}

TEST_CASE("separable limit through the scaled driver")
{
    const auto rec = ground_state_energy_scaled(MeshSpec{30, 30, 20, 1, 1, 1}, 0.0);
    CHECK(rec.converged);
    CHECK(std::abs(rec.energy_scaled + 1.0) <= 1e-10);
    CHECK(std::isnan(rec.Z));
    CHECK(std::isnan(rec.energy));
    CHECK(rec.energy_scaled + 0.5 == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("convergence scan bookkeeping")
{
    const std::vector<std::array<int, 3>> sizes{{8, 8, 6}, {6, 6, 4}, {10, 10, 6}};
    const std::vector<std::array<double, 3>> scales{{1.0, 1.0, 0.5}, {0.8, 0.8, 0.5}};
    const auto a = convergence_scan(1.0, sizes, scales);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto& p = a[i - 1].spec;
        const auto& q = a[i].spec;
        CHECK(std::tie(p.nx, p.ny, p.nz, p.hx, p.hy, p.hz) < std::tie(q.nx, q.ny, q.nz, q.hx, q.hy, q.hz));
    }
    for (const auto& r : a) {
        CHECK(r.converged);
        CHECK(r.stab_digits >= 0);
    }

    const std::vector<std::array<int, 3>> sizes_rev(sizes.rbegin(), sizes.rend());
    const std::vector<std::array<double, 3>> scales_rev(scales.rbegin(), scales.rend());
    const auto b = convergence_scan(1.0, sizes_rev, scales_rev);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].spec == b[i].spec);
        CHECK(a[i].energy == b[i].energy);
        CHECK(a[i].stab_digits == b[i].stab_digits);
    }

    const auto single = convergence_scan(1.0, {{6, 6, 4}}, {{1.0, 1.0, 0.5}});
    REQUIRE(single.size() == 1);
    CHECK(single[0].stab_digits == -1);

    CHECK_THROWS_AS(convergence_scan(1.0, {}, scales), std::invalid_argument);
}

TEST_CASE("scan flags failures and carries on")
{
    EigenOptions o;
    o.maxiter = 2;
    const auto recs = convergence_scan(1.0, {{6, 6, 4}, {8, 8, 4}}, {{1.0, 1.0, 0.5}}, o);
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs)
        CHECK_FALSE(r.converged);
}

TEST_CASE("near-critical sampling")
{
    const MeshSpec spec{10, 10, 8, 1.0, 1.0, 0.5};
    const auto s = scan_near_critical(spec, 0.9, 1.1, 3);
    REQUIRE(s.records.size() == 3);
    REQUIRE(s.second_differences.size() == 1);
    CHECK(s.records[0].energy > s.records[1].energy);
    CHECK(s.records[1].energy > s.records[2].energy);
    CHECK(s.second_differences[0] ==
          doctest::Approx(s.records[0].energy - 2 * s.records[1].energy + s.records[2].energy));
    CHECK_THROWS_AS(scan_near_critical(spec, 0.95, 0.95, 3), std::invalid_argument);
    CHECK_THROWS_AS(scan_near_critical(spec, 0.9, 1.0, 2), std::invalid_argument);
}

TEST_CASE("warm-started sweep matches cold solves")
{
    const MeshSpec spec{12, 12, 8, 1.0, 1.0, 0.5};
    const auto s = scan_near_critical(spec, 0.95, 1.05, 4);
    for (const auto& r : s.records) {
        const auto cold = ground_state_energy(spec, r.Z);
        CHECK(std::abs(cold.energy - r.energy) <= 1e-12);
    }
}

TEST_CASE("E(Z) decreases with Z")
{
    const MeshSpec spec{12, 12, 8, 1.0, 1.0, 0.5};
    const auto s = scan_near_critical(spec, 0.91, 1.1, 6);
    for (std::size_t i = 1; i < s.records.size(); ++i)
        CHECK(s.records[i].energy < s.records[i - 1].energy);
}

TEST_CASE("Z = 1 convergence scan stabilizes with the mesh" * doctest::description("slow"))
{
    const auto recs = convergence_scan(1.0, {{20, 20, 20}, {30, 30, 20}, {40, 40, 20}, {50, 50, 20},
                                             {20, 20, 40}, {30, 30, 40}, {40, 40, 40}, {50, 50, 40}},
                                       {{0.8, 0.8, 0.5}});
    REQUIRE(recs.size() == 8);
    const auto& largest = *std::find_if(recs.begin(), recs.end(), [](const EnergyRecord& r) {
        return r.spec == MeshSpec{50, 50, 40, 0.8, 0.8, 0.5};
    });
    CHECK(largest.stab_digits >= 12);
    CHECK(std::abs(largest.energy + 0.527751016544377) <= 5e-14);
    for (int nz : {20, 40}) {
        int prev = -1;
        for (const auto& r : recs)
            if (r.spec.nz == nz && r.spec.nx >= 30) {
                INFO("N = " << r.spec.nx << ", Nz = " << nz << ", digits " << r.stab_digits);
                CHECK(r.stab_digits >= prev);
                prev = r.stab_digits;
            }
    }
}

TEST_CASE("warm-start pool returns the closest lambda")
{
    WarmStartPool pool;
    CHECK(pool.nearest(1.0) == nullptr);
    pool.add(1.05, StateVector(1, 1, 1, 1.0));
    pool.add(1.12, StateVector(1, 1, 1, 2.0));
    pool.add(1.09, StateVector(1, 1, 1, 3.0));
    CHECK(pool.nearest(0.5)->values[0] == 1.0);
    CHECK(pool.nearest(1.06)->values[0] == 1.0);
    CHECK(pool.nearest(1.08)->values[0] == 3.0);
    CHECK(pool.nearest(1.11)->values[0] == 2.0);
    CHECK(pool.nearest(2.0)->values[0] == 2.0);
    pool.add(1.09, StateVector(1, 1, 1, 4.0));
    CHECK(pool.nearest(1.09)->values[0] == 4.0);
}
