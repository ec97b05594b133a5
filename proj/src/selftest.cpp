#include "meshcrit/selftest.hpp"

#include "meshcrit/eigensolve.hpp"
#include "meshcrit/hamiltonian.hpp"
#include "meshcrit/quadmesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace meshcrit {

namespace {

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

SuiteResult quadrature_suite(const SelftestOptions& opt)
{
    double worst = 0.0;
    for (int n : {1, 2, 3, 5, 10, 20, 40, 70}) {
        auto rule = gauss_laguerre_rule(n);
        rule.raw_weights[0] += opt.perturb_weight;
        const int kmax = std::min(2 * n - 1, 30);
        double factorial = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            if (k > 0)
                factorial *= k;
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
                sum += rule.raw_weights[i] * std::pow(rule.nodes[i], k);
            worst = std::max(worst, std::abs(sum - factorial) / factorial);
        }
    }
    return {"quadrature-exactness", worst <= 1e-12, fmt("max relative moment error %.3g (limit 1e-12)", worst)};
}

SuiteResult derivative_suite()
{
    double worst = 0.0;
    for (int n : {1, 2, 5, 12}) {
        const LagrangeBasis basis(gauss_laguerre_rule(n));
        const auto& d = basis.deriv_matrix();
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < n; ++p) {
                const double u = basis.rule().nodes[p];
                const double fd =
                    ridders_derivative([&](double t) { return basis.eval(i, t); }, u, 0.05 * std::min(1.0, u));
                worst = std::max(worst, std::abs(fd - d(i, p)));
            }
    }
    return {"derivative-oracle", worst <= 1e-8, fmt("max |D - FD| %.3g (limit 1e-8)", worst)};
}

SuiteResult hermiticity_suite()
{
    double worst_sym = 0.0, worst_exchange = 0.0;
    for (const MeshSpec& spec : {MeshSpec{4, 4, 4, 0.8, 0.8, 0.5}, MeshSpec{3, 3, 5, 1.3, 1.3, 0.7}}) {
        const auto h = build_hamiltonian(spec, 1.0 / 0.95, {.exchange_symmetric = true});
        const Eigen::MatrixXd m = assemble_dense(h);
        const double scale = m.cwiseAbs().maxCoeff();
        worst_sym = std::max(worst_sym, (m - m.transpose()).cwiseAbs().maxCoeff() / scale);
        const auto n = m.rows();
        Eigen::MatrixXd pmp(n, n);
        for (int i = 0; i < spec.nx; ++i)
            for (int j = 0; j < spec.ny; ++j)
                for (int k = 0; k < spec.nz; ++k)
                    for (int i2 = 0; i2 < spec.nx; ++i2)
                        for (int j2 = 0; j2 < spec.ny; ++j2)
                            for (int k2 = 0; k2 < spec.nz; ++k2) {
                                const auto& g = h.grid();
                                pmp(static_cast<Eigen::Index>(g.index(i, j, k)),
                                    static_cast<Eigen::Index>(g.index(i2, j2, k2))) =
                                    m(static_cast<Eigen::Index>(g.index(j, i, k)),
                                      static_cast<Eigen::Index>(g.index(j2, i2, k2)));
                            }
        worst_exchange = std::max(worst_exchange, (pmp - m).cwiseAbs().maxCoeff() / scale);
    }
    const bool ok = worst_sym <= 1e-13 && worst_exchange <= 1e-13;
    return {"hermiticity", ok,
            fmt("max |M - M^T| %.3g, max |PMP - M| %.3g (relative, limit 1e-13)", worst_sym, worst_exchange)};
}

SuiteResult dense_suite()
{
    std::mt19937_64 rng(20141108);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (const MeshSpec& spec : {MeshSpec{1, 1, 1, 1, 1, 1}, MeshSpec{2, 2, 2, 1, 1, 1}, MeshSpec{3, 4, 2, 0.9, 1.1, 0.6},
                                 MeshSpec{5, 5, 3, 0.8, 0.8, 0.5}, MeshSpec{6, 6, 6, 2.4, 2.4, 0.4}}) {
        const auto h = build_hamiltonian(spec, 1.0);
        const Eigen::MatrixXd m = assemble_dense(h);
        const std::size_t n = h.dim();
        std::vector<double> v(n), w(n);
        for (int trial = 0; trial < 5; ++trial) {
            for (auto& x : v)
                x = dist(rng);
            h.apply(v, w);
            const Eigen::VectorXd ref = m * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
            const double vn = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)).norm();
            const double scale = std::max(1.0, m.cwiseAbs().maxCoeff()) * vn;
            for (std::size_t i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(w[i] - ref(static_cast<Eigen::Index>(i))) / scale);
        }
    }
    return {"dense-equivalence", worst <= 1e-12, fmt("max relative |Hv - Mv| %.3g (limit 1e-12)", worst)};
}

SuiteResult scaling_suite()
{
    const double Z = 0.95;
    const MeshSpec scaled{6, 6, 6, 1.0, 1.0, 0.5};
    const MeshSpec unscaled{6, 6, 6, 1.0 / Z, 1.0 / Z, 0.5 / Z};
    const Eigen::MatrixXd a = assemble_dense(build_unscaled_hamiltonian(unscaled, Z));
    const Eigen::MatrixXd b = Z * Z * assemble_dense(build_hamiltonian(scaled, 1.0 / Z));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double ref = std::abs(b(i, j));
            if (ref > 0.0)
                worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / ref);
            else
                worst = std::max(worst, std::abs(a(i, j)));
        }
    return {"scaling-identity", worst <= 1e-13, fmt("max entrywise relative deviation %.3g (limit 1e-13)", worst)};
}

} // namespace

double ridders_derivative(const std::function<double(double)>& f, double x, double h0, double* error_estimate)
{
    constexpr int ntab = 12;
    constexpr double con = 1.4, con2 = con * con;
    double a[ntab][ntab];
    double hh = h0;
    double best = 0.0, err = 1e300;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    best = a[0][0];
    for (int i = 1; i < ntab; ++i) {
        hh /= con;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        double fac = con2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            const double errt = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (errt <= err) {
                err = errt;
                best = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err)
            break;
    }
    if (error_estimate)
        *error_estimate = err;
    return best;
}

const std::vector<std::string>& selftest_suites()
{
    static const std::vector<std::string> names{"quadrature-exactness", "derivative-oracle", "hermiticity",
                                                "dense-equivalence", "scaling-identity"};
    return names;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options)
{
    std::vector<SuiteResult> out;
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded("quadrature-exactness", [&] { return quadrature_suite(options); });
    guarded("derivative-oracle", [] { return derivative_suite(); });
    guarded("hermiticity", [] { return hermiticity_suite(); });
    guarded("dense-equivalence", [] { return dense_suite(); });
    guarded("scaling-identity", [] { return scaling_suite(); });
    return out;
}

} // namespace meshcrit
