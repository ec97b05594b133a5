#include "meshcrit/critical.hpp"

#include "meshcrit/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace meshcrit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fill_physical(EnergyRecord& rec)
{
    if (rec.lambda > 0.0) {
        rec.Z = 1.0 / rec.lambda;
        rec.energy = rec.Z * rec.Z * rec.energy_scaled;
        rec.ionization = rec.energy + 0.5 * rec.Z * rec.Z;
    } else {
        rec.Z = kNaN;
        rec.energy = kNaN;
        rec.ionization = kNaN;
    }
}

bool opposite_signs(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

} // namespace

std::array<double, 3> default_scales(double Z)
{
    if (Z >= 0.99)
        return {0.8, 0.8, 0.5};
    if (Z >= 0.93)
        return {1.0, 1.0, 0.5};
    if (Z >= 0.915)
        return {1.0, 1.0, 0.6};
    return {2.4, 2.4, 0.4};
}

MeshSpec default_mesh(double Z)
{
    const auto h = default_scales(Z);
    return {kDefaultMesh[0], kDefaultMesh[1], kDefaultMesh[2], h[0], h[1], h[2]};
}

EnergyRecord ground_state_energy_scaled(const MeshSpec& spec, double lambda, const StateVector* warm,
                                        const EigenOptions& options, StateVector* vector_out)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("ground_state_energy_scaled: lambda must be finite and >= 0");
    const auto start = std::chrono::steady_clock::now();
    const auto h = build_hamiltonian(spec, lambda, {.exchange_symmetric = spec.exchange_symmetric()});
    const StateVector* init = (warm && warm->size() == h.dim()) ? warm : nullptr;
    EigenResult eig = lowest_eigenpair(h, init, options);
    const auto stop = std::chrono::steady_clock::now();

    EnergyRecord rec;
    rec.lambda = lambda;
    rec.spec = spec;
    rec.energy_scaled = eig.energy;
    rec.residual = eig.residual;
    rec.iterations = eig.iterations;
    rec.converged = eig.converged;
    rec.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
    fill_physical(rec);
    if (vector_out)
        *vector_out = std::move(eig.vector);
    return rec;
}

EnergyRecord ground_state_energy(const MeshSpec& spec, double Z, const StateVector* warm,
                                 const EigenOptions& options, StateVector* vector_out)
{
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw std::invalid_argument("ground_state_energy: Z must be positive");
    EnergyRecord rec = ground_state_energy_scaled(spec, 1.0 / Z, warm, options, vector_out);
    // Keep the caller's Z exactly; lambda = 1/Z is what was solved.
    rec.Z = Z;
    rec.energy = Z * Z * rec.energy_scaled;
    rec.ionization = rec.energy + 0.5 * Z * Z;
    return rec;
}

double ionization_energy(const MeshSpec& spec, double Z, const EigenOptions& options)
{
    return ground_state_energy(spec, Z, nullptr, options).ionization;
}

double threshold_energy(double Z)
{
    if (!(Z > 0.0))
        throw std::invalid_argument("threshold_energy: Z must be positive");
    return -0.5 * Z * Z;
}

int stabilized_digits(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b))
        return 0;
    int digits = 0;
    for (int d = 1; d <= 15; ++d) {
        char sa[64], sb[64];
        std::snprintf(sa, sizeof sa, "%.*f", d, a);
        std::snprintf(sb, sizeof sb, "%.*f", d, b);
        if (std::string(sa) != std::string(sb))
            break;
        digits = d;
    }
    return digits;
}

CriticalResult find_critical_charge(const ScaledEnergyFunction& energy, const CriticalOptions& options)
{
    if (!(options.lambda_lo < options.lambda_hi) || !(options.lambda_lo > 0.0))
        throw std::invalid_argument("find_critical_charge: bracket must satisfy 0 < lambda_lo < lambda_hi");
    if (!(options.tol_ionization > 0.0) || !(options.tol_lambda > 0.0))
        throw std::invalid_argument("find_critical_charge: tolerances must be positive");

    CriticalResult result;
    auto g_of = [](const CriticalEvaluation& e) { return e.energy_scaled + 0.5; };
    auto evaluate = [&](double lambda) -> std::pair<double, bool> {
        CriticalEvaluation e = energy(lambda);
        e.lambda = lambda;
        result.history.push_back(e);
        if (!e.converged || !std::isfinite(e.energy_scaled)) {
            result.solver_failed = true;
            return {kNaN, false};
        }
        return {g_of(e), true};
    };
    auto finish = [&]() {
        // Best point over the whole history.
        const CriticalEvaluation* best = nullptr;
        for (const auto& e : result.history)
            if (e.converged && std::isfinite(e.energy_scaled) &&
                (!best || std::abs(g_of(e)) < std::abs(g_of(*best))))
                best = &e;
        if (best) {
            result.lambda_critical = best->lambda;
            result.z_critical = 1.0 / best->lambda;
            result.energy_scaled = best->energy_scaled;
            const double z2 = result.z_critical * result.z_critical;
            result.energy = z2 * best->energy_scaled;
            result.final_ionization = z2 * g_of(*best);
            result.threshold_energy = -0.5 * z2;
        }
        return result;
    };

    auto [f_lo, ok_lo] = evaluate(options.lambda_lo);
    if (!ok_lo)
        return finish();
    auto [f_hi, ok_hi] = evaluate(options.lambda_hi);
    if (!ok_hi)
        return finish();
    if (f_lo == 0.0 || f_hi == 0.0) {
        result.converged = true;
        return finish();
    }
    if (!opposite_signs(f_lo, f_hi))
        throw BracketError("find_critical_charge: E~ + 1/2 has the same sign at both ends of [" +
                           std::to_string(options.lambda_lo) + ", " + std::to_string(options.lambda_hi) + "]");

    // b: best iterate, a: contrapoint (opposite sign), c: previous b.
    double a = options.lambda_lo, fa = f_lo;
    double b = options.lambda_hi, fb = f_hi;
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa;
    double width_prev2 = std::abs(b - a) * 2.0;
    double width_prev1 = std::abs(b - a) * 2.0;

    while (static_cast<int>(result.history.size()) < options.max_evaluations) {
        if (std::abs(fb) <= options.tol_ionization || std::abs(b - a) <= options.tol_lambda) {
            result.converged = true;
            break;
        }
        const double mid = b + 0.5 * (a - b);
        double s = (fb != fc) ? b - fb * (b - c) / (fb - fc) : mid;
        // Secant point must fall strictly between b and the midpoint.
        const bool inside = (s - b) * (mid - s) > 0.0 || s == mid;
        const double width = std::abs(b - a);
        if (!inside || !std::isfinite(s) || width > 0.5 * width_prev2)
            s = mid;
        // Never re-evaluate (numerically) the same point.
        const double min_step = 0.5 * options.tol_lambda;
        if (std::abs(s - b) < min_step)
            s = b + std::copysign(min_step, a - b);

        auto [fs, ok] = evaluate(s);
        if (!ok)
            return finish();
        width_prev2 = width_prev1;
        width_prev1 = width;

        c = b;
        fc = fb;
        if (opposite_signs(fs, fb) || fs == 0.0) {
            a = b;
            fa = fb;
        }
        b = s;
        fb = fs;
        if (fs == 0.0) {
            result.converged = true;
            break;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
            c = a;
            fc = fa;
        }
    }
    if (!result.converged && (std::abs(fb) <= options.tol_ionization || std::abs(b - a) <= options.tol_lambda))
        result.converged = true;
    return finish();
}

void WarmStartPool::add(double lambda, StateVector v) { vectors_.insert_or_assign(lambda, std::move(v)); }

const StateVector* WarmStartPool::nearest(double lambda) const
{
    if (vectors_.empty())
        return nullptr;
    auto hi = vectors_.lower_bound(lambda);
    if (hi == vectors_.end())
        return &std::prev(hi)->second;
    if (hi == vectors_.begin())
        return &hi->second;
    auto lo = std::prev(hi);
    return lambda - lo->first <= hi->first - lambda ? &lo->second : &hi->second;
}

CriticalResult find_critical_charge(const MeshSpec& spec, const CriticalOptions& options, const EigenOptions& eigen)
{
    validate(spec);
    WarmStartPool pool;
    ScaledEnergyFunction energy = [&](double lambda) {
        StateVector next;
        const EnergyRecord rec = ground_state_energy_scaled(spec, lambda, pool.nearest(lambda), eigen, &next);
        if (rec.converged)
            pool.add(lambda, std::move(next));
        return CriticalEvaluation{lambda, rec.energy_scaled, rec.residual, rec.iterations, rec.converged};
    };
    CriticalResult result = find_critical_charge(energy, options);
    result.spec = spec;
    return result;
}

std::vector<EnergyRecord> convergence_scan(double Z, const std::vector<std::array<int, 3>>& sizes,
                                           const std::vector<std::array<double, 3>>& scales,
                                           const EigenOptions& options)
{
    if (sizes.empty() || scales.empty())
        throw std::invalid_argument("convergence_scan: mesh size and scale lists must be non-empty");
    if (!(Z > 0.0))
        throw std::invalid_argument("convergence_scan: Z must be positive");

    // Deduplicated and ordered by key, so list order does not matter.
    using Key = std::tuple<int, int, int, double, double, double>;
    std::map<Key, MeshSpec> jobs;
    for (const auto& n : sizes)
        for (const auto& h : scales)
            jobs.emplace(Key{n[0], n[1], n[2], h[0], h[1], h[2]}, MeshSpec{n[0], n[1], n[2], h[0], h[1], h[2]});

    std::vector<MeshSpec> specs;
    for (const auto& [key, spec] : jobs)
        specs.push_back(spec);
    std::vector<EnergyRecord> records(specs.size());

#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < specs.size(); ++i) {
        try {
            records[i] = ground_state_energy(specs[i], Z, nullptr, options);
        } catch (const std::exception& e) {
            EnergyRecord rec;
            rec.Z = Z;
            rec.lambda = 1.0 / Z;
            rec.spec = specs[i];
            rec.energy_scaled = rec.energy = rec.ionization = rec.residual = kNaN;
            rec.converged = false;
            rec.error = e.what();
            records[i] = rec;
        }
    }

    // Stabilized digits within each scale group.
    std::map<std::tuple<double, double, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& s = records[i].spec;
        groups[{s.hx, s.hy, s.hz}].push_back(i);
    }
    for (auto& [h, members] : groups) {
        if (members.size() < 2)
            continue;
        std::stable_sort(members.begin(), members.end(), [&](std::size_t l, std::size_t r) {
            return records[l].spec.points() < records[r].spec.points();
        });
        const std::size_t largest = members.back();
        const std::size_t runner_up = members[members.size() - 2];
        for (std::size_t idx : members) {
            const std::size_t ref = idx == largest ? runner_up : largest;
            records[idx].stab_digits = stabilized_digits(records[idx].energy, records[ref].energy);
        }
    }
    return records;
}

NearCriticalScan scan_near_critical(const MeshSpec& spec, double z_lo, double z_hi, int n_points,
                                    const EigenOptions& options)
{
    if (!(z_lo < z_hi) || !(z_lo > 0.0))
        throw std::invalid_argument("scan_near_critical: need 0 < Z_lo < Z_hi");
    if (n_points < 3)
        throw std::invalid_argument("scan_near_critical: need at least 3 points");
    validate(spec);

    NearCriticalScan out;
    StateVector warm;
    for (int i = 0; i < n_points; ++i) {
        const double Z = z_lo + (z_hi - z_lo) * i / (n_points - 1);
        StateVector next;
        out.records.push_back(ground_state_energy(spec, Z, warm.size() ? &warm : nullptr, options, &next));
        warm = std::move(next);
    }
    for (int i = 1; i + 1 < n_points; ++i)
        out.second_differences.push_back(out.records[i - 1].energy - 2.0 * out.records[i].energy +
                                         out.records[i + 1].energy);
    return out;
}

} // namespace meshcrit
