#pragma once

#include <Eigen/Dense>

#include <vector>

namespace meshcrit {

/// N-point Gauss-Laguerre rule for the weight e^{-u} on [0, inf).
///
/// `reg_weights` are w_i e^{u_i}; they integrate functions that carry their
/// own exponential decay, which is how the Lagrange functions are used.
struct GaussLaguerreRule {
    int n = 0;
    std::vector<double> nodes;
    std::vector<double> raw_weights;
    std::vector<double> reg_weights;
};

inline constexpr int kMaxRulePoints = 200;

/// Nodes are the zeros of L_n, found by Newton iteration on the three-term
/// recurrence. Throws std::invalid_argument unless 1 <= n <= kMaxRulePoints.
GaussLaguerreRule gauss_laguerre_rule(int n);

/// Which family of cardinal functions is built on the rule.
///
/// `plain`:       f_i(u) = s_i u_i^{1/2}  L_n(u) e^{-u/2} / (u - u_i)
/// `regularized`: f_i(u) = s_i u_i^{-1/2} u L_n(u) e^{-u/2} / (u - u_i)
///
/// s_i = sign L_n'(u_i) = (-1)^i for 1-based i. Both satisfy
/// f_i(u_j) = delta_ij / sqrt(reg_weight_j). The regularized family vanishes
/// at u = 0; the three-body operator needs the plain one, whose members do not.
enum class LagrangeForm { plain, regularized };

class LagrangeBasis {
  public:
    explicit LagrangeBasis(GaussLaguerreRule rule, LagrangeForm form = LagrangeForm::plain);

    const GaussLaguerreRule& rule() const noexcept { return rule_; }
    LagrangeForm form() const noexcept { return form_; }
    int size() const noexcept { return rule_.n; }

    /// f_i(u) with 0-based i. The removable singularity at u = u_i is taken
    /// by its limit. Throws DomainError for u <= 0, std::out_of_range for i.
    double eval(int i, double u) const;

    /// D(i, p) = f_i'(u_p).
    const Eigen::MatrixXd& deriv_matrix() const noexcept { return deriv_; }

  private:
    GaussLaguerreRule rule_;
    LagrangeForm form_;
    std::vector<double> scale_;  // c_i in f_i = c_i u^a L_n e^{-u/2} / (u - u_i)
    std::vector<double> dlaguerre_;  // L_n'(u_i) e^{-u_i/2}
    Eigen::MatrixXd deriv_;
};

double lagrange_eval(const LagrangeBasis& basis, int i, double u);

Eigen::MatrixXd derivative_matrix(const LagrangeBasis& basis);

/// L_n(u) e^{-u/2} and its derivative (of L_n, times e^{-u/2}) from the
/// jointly scaled recurrence; never forms L_n alone.
struct ScaledLaguerre {
    double value;
    double derivative;
};
ScaledLaguerre scaled_laguerre(int n, double u);

} // namespace meshcrit
