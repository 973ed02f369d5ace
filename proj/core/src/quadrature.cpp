#include "bnet/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bnet {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kCoarsestStep = 0.5;  // resolves exp(-x^2) alone to ~1e-17

// Step that keeps the trapezoid aliasing term exp(-2 pi d / h) below ~1e-16
// for an integrand analytic in |Im x| < d (0.8 d keeps clear of the poles).
double strip_step(double d) { return 2.0 * std::numbers::pi * 0.8 * d / 40.0; }

template <class G>
double expect_with(const QuadratureRule& rule, double v, double K, G&& g) {
  const double scale = std::sqrt(2.0 * K);
  const auto x = rule.nodes();
  const auto w = rule.weights();
  double sum = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) sum += w[m] * g(v + scale * x[m]);
  return sum / kSqrtPi;
}

}  // namespace

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 2) throw std::invalid_argument("Gauss-Hermite order must be at least 2");
  // Jacobi matrix of the Hermite recurrence: zero diagonal, sqrt(k/2) off it.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Golub-Welsch eigenproblem did not converge");
  }
  std::vector<double> nodes(order);
  std::vector<double> weights(order);
  for (int k = 0; k < order; ++k) {
    nodes[k] = solver.eigenvalues()[k];
    const double v0 = solver.eigenvectors()(0, k);
    weights[k] = kSqrtPi * v0 * v0;
  }
  // Exact symmetry about the origin.
  for (int k = 0; k < order / 2; ++k) {
    const int m = order - 1 - k;
    const double x = 0.5 * (nodes[m] - nodes[k]);
    const double w = 0.5 * (weights[m] + weights[k]);
    nodes[k] = -x;
    nodes[m] = x;
    weights[k] = weights[m] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0;
  return QuadratureRule(std::move(nodes), std::move(weights));
}

QuadratureRule QuadratureRule::trapezoid(double step, double half_width) {
  if (!(step > 0.0) || !(half_width > 0.0)) {
    throw std::invalid_argument("trapezoid rule needs positive step and half-width");
  }
  const auto m_max = static_cast<long>(std::ceil(half_width / step));
  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(2 * m_max + 1);
  weights.reserve(2 * m_max + 1);
  for (long m = -m_max; m <= m_max; ++m) {
    const double x = static_cast<double>(m) * step;
    nodes.push_back(x);
    weights.push_back(step * std::exp(-x * x));
  }
  return QuadratureRule(std::move(nodes), std::move(weights));
}

RuleSet::RuleSet(int gauss_hermite_order)
    : gauss_hermite_(QuadratureRule::gauss_hermite(gauss_hermite_order)) {
  trapezoid_levels_.reserve(kLevels);
  for (int k = 0; k < kLevels; ++k) {
    trapezoid_levels_.push_back(QuadratureRule::trapezoid(kCoarsestStep * std::exp2(-k / 4.0)));
  }
}

const QuadratureRule& RuleSet::for_rate(const FiringRate& f, double K, int refinement) const {
  const auto strip = f.analytic_strip();
  if (!strip) return gauss_hermite_;
  int level = 0;
  if (K > 0.0 && std::isfinite(*strip)) {
    const double wanted = strip_step(*strip / std::sqrt(2.0 * K));
    if (wanted < kCoarsestStep) {
      level = static_cast<int>(std::ceil(4.0 * std::log2(kCoarsestStep / wanted) - 1e-9));
    }
  }
  level = std::clamp(level + refinement, 0, kLevels - 1);
  return trapezoid_levels_[level];
}

const RuleSet& RuleSet::standard() {
  static const RuleSet rules;
  return rules;
}

double rho(double K, double x) {
  if (!(K > 0.0)) throw std::domain_error("rho: variance must be positive");
  return std::exp(-x * x / (2.0 * K)) / std::sqrt(2.0 * std::numbers::pi * K);
}

double gauss_expect(const FiringRate& f, double v, double K, const QuadratureRule& rule) {
  if (K < 0.0) throw std::domain_error("gauss_expect: negative variance");
  if (K == 0.0) return f(v);
  return expect_with(rule, v, K, [&](double x) { return f(x); });
}

double gauss_expect(const FiringRate& f, double v, double K) {
  return gauss_expect(f, v, K, RuleSet::standard().for_rate(f, K));
}

double gauss_expect_dv(const FiringRate& f, double v, double K) {
  if (K < 0.0) throw std::domain_error("gauss_expect_dv: negative variance");
  if (f.has_derivative()) {
    if (K == 0.0) return f.derivative(v);
    const auto& rule = RuleSet::standard().for_rate(f, K);
    return expect_with(rule, v, K, [&](double x) { return f.derivative(x); });
  }
  const double h = 1e-6 * std::max(1.0, std::abs(v));
  return (gauss_expect(f, v + h, K) - gauss_expect(f, v - h, K)) / (2.0 * h);
}

double gauss_expect_dK(const FiringRate& f, double v, double K) {
  if (!(K > 0.0)) throw std::domain_error("gauss_expect_dK: variance must be positive");
  if (f.has_second_derivative()) {
    const auto& rule = RuleSet::standard().for_rate(f, K);
    return 0.5 * expect_with(rule, v, K, [&](double x) { return f.second_derivative(x); });
  }
  const double h = std::min(1e-6 * std::max(1.0, K), 0.5 * K);
  return (gauss_expect(f, v, K + h) - gauss_expect(f, v, K - h)) / (2.0 * h);
}

PopulationPair balance_F(const MacroState& m, const NetworkParams& p) {
  return {p.C(kEE) * gauss_expect(p.f(kEE), m.v_e, m.K_e) -
              p.C(kEI) * gauss_expect(p.f(kEI), m.v_i, m.K_i),
          p.C(kIE) * gauss_expect(p.f(kIE), m.v_e, m.K_e) -
              p.C(kII) * gauss_expect(p.f(kII), m.v_i, m.K_i)};
}

PopulationPair noise_Sigma(const MacroState& m, const NetworkParams& p) {
  auto sq = [](double c) { return c * c; };
  return {sq(p.C(kEE)) * gauss_expect(p.f(kEE), m.v_e, m.K_e) +
              sq(p.C(kEI)) * gauss_expect(p.f(kEI), m.v_i, m.K_i),
          sq(p.C(kIE)) * gauss_expect(p.f(kIE), m.v_e, m.K_e) +
              sq(p.C(kII)) * gauss_expect(p.f(kII), m.v_i, m.K_i)};
}

Jacobian2x2 jacobian_v(const MacroState& m, const NetworkParams& p) {
  return {p.C(kEE) * gauss_expect_dv(p.f(kEE), m.v_e, m.K_e),
          -p.C(kEI) * gauss_expect_dv(p.f(kEI), m.v_i, m.K_i),
          p.C(kIE) * gauss_expect_dv(p.f(kIE), m.v_e, m.K_e),
          -p.C(kII) * gauss_expect_dv(p.f(kII), m.v_i, m.K_i)};
}

Jacobian2x2 jacobian_K(const MacroState& m, const NetworkParams& p) {
  if (!(m.K_e > 0.0) || !(m.K_i > 0.0)) {
    throw std::domain_error("jacobian_K: variances must be positive");
  }
  return {p.C(kEE) * gauss_expect_dK(p.f(kEE), m.v_e, m.K_e),
          -p.C(kEI) * gauss_expect_dK(p.f(kEI), m.v_i, m.K_i),
          p.C(kIE) * gauss_expect_dK(p.f(kIE), m.v_e, m.K_e),
          -p.C(kII) * gauss_expect_dK(p.f(kII), m.v_i, m.K_i)};
}

}  // namespace bnet
