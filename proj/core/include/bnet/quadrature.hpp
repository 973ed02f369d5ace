#pragma once

#include <span>
#include <vector>

#include "bnet/model.hpp"

namespace bnet {

/// Nodes and weights for integrals against exp(-x^2) (physicists'
/// normalisation: the weights sum to sqrt(pi) and the nodes are symmetric).
class QuadratureRule {
 public:
  /// Gauss–Hermite rule from the Golub–Welsch eigenproblem.
  static QuadratureRule gauss_hermite(int order);
  /// Truncated trapezoidal rule x_m = m * step, |x_m| <= half_width.
  /// Converges geometrically for integrands analytic in a strip.
  static QuadratureRule trapezoid(double step, double half_width = kTrapezoidHalfWidth);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  int order() const { return static_cast<int>(nodes_.size()); }

  static constexpr double kTrapezoidHalfWidth = 6.5;  // exp(-6.5^2) ~ 4e-19

 private:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Immutable family of rules shared by all Gaussian expectations. Rates with a
/// known analyticity strip get a trapezoidal rule whose step is matched to
/// the strip width after scaling by sqrt(2K); other rates use Gauss–Hermite.
class RuleSet {
 public:
  explicit RuleSet(int gauss_hermite_order = 64);

  const QuadratureRule& gauss_hermite() const { return gauss_hermite_; }
  /// `refinement` selects a rule with the step divided by 2^(refinement / 4).
  const QuadratureRule& for_rate(const FiringRate& f, double K, int refinement = 0) const;

  static const RuleSet& standard();

  static constexpr int kLevels = 41;  // steps 0.5 * 2^(-k/4), k < kLevels

 private:
  QuadratureRule gauss_hermite_;
  std::vector<QuadratureRule> trapezoid_levels_;
};

/// Centered Gaussian density with variance K. Throws for K <= 0.
double rho(double K, double x);

/// E[f(v + sqrt(K) Z)] with the given rule; f(v) exactly when K == 0.
double gauss_expect(const FiringRate& f, double v, double K, const QuadratureRule& rule);
/// Same, with the rule picked from RuleSet::standard().
double gauss_expect(const FiringRate& f, double v, double K);

/// d/dv E[f(v + sqrt(K) Z)]: analytic f' when available, otherwise central
/// differences with step 1e-6 * max(1, |v|).
double gauss_expect_dv(const FiringRate& f, double v, double K);
/// d/dK E[f(v + sqrt(K) Z)] = E[f''] / 2 when f'' is available, otherwise
/// central differences with step 1e-6 * max(1, K). Requires K > 0.
double gauss_expect_dK(const FiringRate& f, double v, double K);

/// Row = (F_e, F_i), column = differentiation variable.
struct Jacobian2x2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
};

PopulationPair balance_F(const MacroState& m, const NetworkParams& p);
PopulationPair noise_Sigma(const MacroState& m, const NetworkParams& p);
Jacobian2x2 jacobian_v(const MacroState& m, const NetworkParams& p);
/// Throws std::domain_error unless K_e, K_i > 0.
Jacobian2x2 jacobian_K(const MacroState& m, const NetworkParams& p);

}  // namespace bnet
