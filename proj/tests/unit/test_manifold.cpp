#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bnet/manifold.hpp"
#include "oracles.hpp"

using namespace bnet;

namespace {

// Roots of F = 0 for the reference network, from a dense-trapezoid
// expectation with nested bisection and an independent Newton polish.
constexpr double kRootE_11 = -4.194259324634018;
constexpr double kRootI_11 = -1.1799192282251993;
constexpr double kRootE_105 = -3.0609858399412966;
constexpr double kRootI_105 = -0.9409409185619474;

oracle::Tanh as_oracle(const FiringRate& f) {
  const auto* t = f.tanh_affine();
  return {t->scale, t->offset, t->gain};
}

FiringRate linear_rate(double intercept, double slope) {
  CustomRate r;
  r.bound = 1e6;
  r.value = [=](double x) { return intercept + slope * x; };
  r.first_derivative = [=](double) { return slope; };
  r.second_derivative = [](double) { return 0.0; };
  r.analytic_strip = 1e6;
  return FiringRate(r);
}

}  // namespace

TEST(SolveBalance, ReferenceRootsResidualAndStability) {
  const NetworkParams p = reference_params();
  for (const auto& [ki, me, mi] : {std::tuple{1.0, kRootE_11, kRootI_11},
                                   std::tuple{0.5, kRootE_105, kRootI_105}}) {
    const BalancePoint b = solve_balance(1.0, ki, p);
    EXPECT_LE(std::abs(b.residual.e), 1e-12);
    EXPECT_LE(std::abs(b.residual.i), 1e-12);
    EXPECT_NEAR(b.m_e, me, 1e-9);
    EXPECT_NEAR(b.m_i, mi, 1e-9);
    const ManifoldReport r = classify({b.m_e, b.m_i, 1.0, ki}, p);
    EXPECT_TRUE(r.in_U);
    EXPECT_GT(r.zeta, 0.0);
  }
}

TEST(SolveBalance, AgreesWithNestedBisectionOracle) {
  const NetworkParams p = reference_params();
  oracle::Net net{p.C(kEE), p.C(kEI), p.C(kIE), p.C(kII),
                  as_oracle(p.f(kEE)), as_oracle(p.f(kEI)), as_oracle(p.f(kIE)), as_oracle(p.f(kII))};
  net.panels = 4000;
  const auto [ve, vi] = oracle::balance_root(net, 1.0, 1.0, -3.0, 0.0);
  const BalancePoint b = solve_balance(1.0, 1.0, p);
  EXPECT_NEAR(b.m_e, ve, 1e-6);
  EXPECT_NEAR(b.m_i, vi, 1e-6);
}

TEST(SolveBalance, GuessWithinUnitDistanceReachesSameRoot) {
  const NetworkParams p = reference_params();
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586), radius(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double a = angle(g);
    const double r = radius(g);
    BalanceOptions opt;
    opt.guess = {kRootE_11 + r * std::cos(a), kRootI_11 + r * std::sin(a)};
    const BalancePoint b = solve_balance(1.0, 1.0, p, opt);
    EXPECT_NEAR(b.m_e, kRootE_11, 1e-10);
    EXPECT_NEAR(b.m_i, kRootI_11, 1e-10);
  }
}

TEST(SolveBalance, FullySymmetricNetwork) {
  NetworkParams p = reference_params();
  p.C(kIE) = p.C(kEE);
  p.C(kII) = p.C(kEI);
  p.f(kIE) = p.f(kEE);
  p.f(kII) = p.f(kEI);
  const BalancePoint b = solve_balance(0.8, 0.8, p);
  EXPECT_LE(std::abs(b.residual.e), 1e-12);
  EXPECT_LE(std::abs(b.residual.i), 1e-12);
  const auto F = balance_F({b.m_e, b.m_i, 0.8, 0.8}, p);
  EXPECT_DOUBLE_EQ(F.e, F.i);
}

TEST(SolveBalance, NoRootWhenInhibitionCannotBeMatched) {
  NetworkParams p = reference_params();
  p.C(kIE) = 0.0;  // F_i = -C_ii E[f_ii] < 0 everywhere
  try {
    solve_balance(1.0, 1.0, p);
    FAIL() << "expected NoRootError";
  } catch (const NoRootError& e) {
    EXPECT_GT(e.best_residual(), 0.0);
  }
}

TEST(SolveBalance, SingularWhenJacobianVanishes) {
  NetworkParams p = reference_params();
  for (const ChannelId ch : kChannels) p.f(ch) = FiringRate::constant(1.0);
  EXPECT_THROW(solve_balance(1.0, 1.0, p), SingularJacobianError);
}

TEST(SolveBalance, RejectsNegativeVariance) {
  EXPECT_THROW(solve_balance(-1.0, 1.0, reference_params()), std::invalid_argument);
}

TEST(Classify, ZeroCouplingIsNotBalanced) {
  NetworkParams p = reference_params();
  p.coupling = {0, 0, 0, 0};
  const ManifoldReport r = classify({3.0, -7.0, 1.0, 2.0}, p);
  EXPECT_EQ(r.residual.e, 0.0);
  EXPECT_EQ(r.residual.i, 0.0);
  EXPECT_EQ(r.eig[0], std::complex<double>(0.0));
  EXPECT_EQ(r.eig[1], std::complex<double>(0.0));
  EXPECT_FALSE(r.in_U);
}

TEST(Classify, DiagonalJacobianGivesMargin) {
  NetworkParams p = reference_params();
  p.coupling = {1.0, 0.0, 0.0, 2.0};
  p.f(kEE) = linear_rate(1.0, -1.0);
  p.f(kII) = linear_rate(1.0, 1.0);
  // F_e = 1 - v_e, F_i = -2 (1 + v_i): root at (1, -1)
  const ManifoldReport r = classify({1.0, -1.0, 0.5, 0.5}, p);
  EXPECT_NEAR(r.zeta, 1.0, 1e-14);
  EXPECT_TRUE(r.in_U);
  EXPECT_FALSE(classify({1.5, -1.0, 0.5, 0.5}, p).in_U);
}

TEST(Eigenvalues, SatisfyCharacteristicEquation) {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    Jacobian2x2 J{u(g), u(g), u(g), u(g)};
    const double tr = J.trace();
    const double det = J.det();
    for (const auto& lam : eigenvalues(J)) {
      const auto res = lam * lam - tr * lam + det;
      EXPECT_LE(std::abs(res), 1e-10 * std::max({1.0, std::abs(tr), std::abs(det)}));
    }
  }
}

TEST(Classify, MarginSignMatchesVerdictOnRandomDraws) {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> gain(0.2, 2.0), coupling(0.3, 2.0);
  int tested = 0;
  for (int k = 0; k < 40; ++k) {
    NetworkParams p = reference_params();
    p.coupling = {coupling(g), coupling(g), coupling(g), coupling(g)};
    p.f(kEI) = TanhAffine{1, 1, gain(g)};
    p.f(kIE) = TanhAffine{0.5, 2, gain(g)};
    try {
      const BalancePoint b = solve_balance(1.0, 1.0, p);
      const ManifoldReport r = classify({b.m_e, b.m_i, 1.0, 1.0}, p);
      EXPECT_EQ(r.in_U, r.zeta > 0.0);
      ++tested;
    } catch (const NoRootError&) {
    }
  }
  EXPECT_GT(tested, 5);
}
