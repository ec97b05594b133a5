#include "meshcrit/quadmesh.hpp"

#include "meshcrit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace meshcrit {

namespace {

// Recurrence kept in [1e-100, 1e100] by rescaling; the accumulated log scale
// is folded together with e^{-u/2} at the end.
struct LaguerrePair {
    double ln;       // L_n(u) * exp(-log_scale)
    double lnm1;     // L_{n-1}(u) * exp(-log_scale)
    double log_scale;
};

LaguerrePair laguerre_recurrence(int n, double u)
{
    double p0 = 1.0;
    double p1 = 1.0 - u;
    double log_scale = 0.0;
    if (n == 0)
        return {p0, 0.0, 0.0};
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0 - u) * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
        if (std::abs(p1) > 1e100) {
            p0 *= 1e-100;
            p1 *= 1e-100;
            log_scale += 100.0 * std::log(10.0);
        }
    }
    return {p1, p0, log_scale};
}

// Initial guesses for the k-th zero (Numerical Recipes gaulag, alpha = 0).
double initial_guess(int k, int n, const std::vector<double>& z)
{
    if (k == 0)
        return 3.0 / (1.0 + 2.4 * n);
    if (k == 1)
        return z[0] + 15.0 / (1.0 + 2.5 * n);
    const double ai = k - 1;
    return z[k - 1] + (1.0 + 2.55 * ai) / (1.9 * ai) * (z[k - 1] - z[k - 2]);
}

} // namespace

ScaledLaguerre scaled_laguerre(int n, double u)
{
    if (n < 0)
        throw std::invalid_argument("scaled_laguerre: negative degree");
    const auto r = laguerre_recurrence(n, u);
    const double factor = std::exp(r.log_scale - 0.5 * u);
    double deriv;
    if (n == 0)
        deriv = 0.0;
    else if (u == 0.0)
        deriv = -static_cast<double>(n) * factor;  // L_n'(0) = -n
    else
        deriv = n * (r.ln - r.lnm1) / u * factor;
    return {r.ln * factor, deriv};
}

GaussLaguerreRule gauss_laguerre_rule(int n)
{
    if (n < 1 || n > kMaxRulePoints)
        throw std::invalid_argument("gauss_laguerre_rule: n must lie in [1, " +
                                    std::to_string(kMaxRulePoints) + "], got " + std::to_string(n));

    GaussLaguerreRule rule;
    rule.n = n;
    rule.nodes.resize(n);
    rule.raw_weights.resize(n);
    rule.reg_weights.resize(n);

    constexpr int max_newton = 200;
    for (int k = 0; k < n; ++k) {
        double z = initial_guess(k, n, rule.nodes);
        bool converged = false;
        double prev_step = std::numeric_limits<double>::infinity();
        for (int it = 0; it < max_newton; ++it) {
            const auto r = laguerre_recurrence(n, z);
            const double dp = n * (r.ln - r.lnm1) / z;
            const double step = r.ln / dp;
            z -= step;
            // Near small nodes the recurrence carries a few ulp of noise, so
            // also stop once the steps have stagnated at round-off level.
            if (std::abs(step) <= 1e-15 * z ||
                (std::abs(step) <= 1e-12 * z && std::abs(step) >= 0.5 * std::abs(prev_step))) {
                converged = true;
                break;
            }
            prev_step = step;
        }
        if (!converged || !(z > 0.0))
            throw NumericError("gauss_laguerre_rule: Newton failed for node " + std::to_string(k) +
                               " of n=" + std::to_string(n));
        rule.nodes[k] = z;
    }
    for (int k = 1; k < n; ++k) {
        if (!(rule.nodes[k] > rule.nodes[k - 1]))
            throw NumericError("gauss_laguerre_rule: nodes not strictly increasing for n=" +
                               std::to_string(n));
    }

    for (int k = 0; k < n; ++k) {
        const double u = rule.nodes[k];
        const double dl = scaled_laguerre(n, u).derivative;  // L_n'(u) e^{-u/2}
        rule.reg_weights[k] = 1.0 / (u * dl * dl);
        rule.raw_weights[k] = rule.reg_weights[k] * std::exp(-u);
    }
    return rule;
}

LagrangeBasis::LagrangeBasis(GaussLaguerreRule rule, LagrangeForm form)
    : rule_(std::move(rule)), form_(form)
{
    const int n = rule_.n;
    if (n < 1 || static_cast<int>(rule_.nodes.size()) != n)
        throw std::invalid_argument("LagrangeBasis: malformed rule");
    const double a = form_ == LagrangeForm::regularized ? 1.0 : 0.0;
    const auto& u = rule_.nodes;

    scale_.resize(n);
    dlaguerre_.resize(n);
    std::vector<double> inv_sqrt_lam(n);
    for (int i = 0; i < n; ++i) {
        dlaguerre_[i] = scaled_laguerre(n, u[i]).derivative;
        inv_sqrt_lam[i] = 1.0 / std::sqrt(rule_.reg_weights[i]);
        scale_[i] = inv_sqrt_lam[i] / (std::pow(u[i], a) * dlaguerre_[i]);
    }

    // Off the diagonal g(u_p) = 0, so f_i'(u_p) = c_i g'(u_p) / (u_p - u_i).
    // On it, f_i'(u_i) = c_i g''(u_i) / 2 with L_n'' = (u - 1) L_n' / u.
    deriv_.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int p = 0; p < n; ++p) {
            if (p == i)
                deriv_(i, i) = inv_sqrt_lam[i] * (2.0 * a - 1.0) / (2.0 * u[i]);
            else
                deriv_(i, p) = scale_[i] * std::pow(u[p], a) * dlaguerre_[p] / (u[p] - u[i]);
        }
    }
}

double LagrangeBasis::eval(int i, double u) const
{
    if (i < 0 || i >= rule_.n)
        throw std::out_of_range("LagrangeBasis::eval: index " + std::to_string(i));
    if (!(u > 0.0))
        throw DomainError("LagrangeBasis::eval: u must be positive");
    const double ui = rule_.nodes[i];
    const double delta = u - ui;
    // Near u_i the quotient loses digits like eps * spacing / |delta|, while the
    // first-order expansion errs by about (delta / spacing)^2.
    double spacing = ui;
    if (i > 0)
        spacing = std::min(spacing, ui - rule_.nodes[i - 1]);
    if (i + 1 < rule_.n)
        spacing = std::min(spacing, rule_.nodes[i + 1] - ui);
    if (std::abs(delta) <= 1e-7 * spacing)
        return 1.0 / std::sqrt(rule_.reg_weights[i]) + deriv_(i, i) * delta;
    // Exactly at another node the numerator is a rounded zero of L_n.
    if (std::binary_search(rule_.nodes.begin(), rule_.nodes.end(), u))
        return 0.0;
    const double a = form_ == LagrangeForm::regularized ? 1.0 : 0.0;
    return scale_[i] * std::pow(u, a) * scaled_laguerre(rule_.n, u).value / delta;
}

double lagrange_eval(const LagrangeBasis& basis, int i, double u) { return basis.eval(i, u); }

Eigen::MatrixXd derivative_matrix(const LagrangeBasis& basis) { return basis.deriv_matrix(); }

} // namespace meshcrit
