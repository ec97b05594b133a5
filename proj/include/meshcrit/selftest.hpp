#pragma once

#include <functional>
#include <string>
#include <vector>

namespace meshcrit {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestOptions {
    /// Debug hook: added to the first raw weight of every rule checked by
    /// the quadrature suite.
    double perturb_weight = 0.0;
};

/// Suite names, in the order they run.
const std::vector<std::string>& selftest_suites();

/// Quadrature exactness, derivative oracle, Hermiticity, dense equivalence,
/// scaling identity.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

/// Ridders' extrapolated central difference of f at x, starting step h0;
/// independent of any analytic derivative formula.
double ridders_derivative(const std::function<double(double)>& f, double x, double h0, double* error_estimate = nullptr);

} // namespace meshcrit
