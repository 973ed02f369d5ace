#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bnet/simulator.hpp"

using namespace bnet;

namespace {

NetworkParams small_reference(std::size_t n) {
  NetworkParams p = reference_params();
  p.n = n;
  return p;
}

SimConfig fixed_config(double T, double dt, std::uint64_t seed, double stride = 0.01) {
  SimConfig cfg;
  cfg.method = FixedStepMethod{dt};
  cfg.T = T;
  cfg.seed = seed;
  cfg.record_stride = stride;
  return cfg;
}

SimConfig exact_config(double T, std::uint64_t seed, double stride = 0.01) {
  SimConfig cfg;
  cfg.method = ExactMethod{};
  cfg.T = T;
  cfg.seed = seed;
  cfg.record_stride = stride;
  return cfg;
}

MicroState reference_init(const NetworkParams& p, std::uint64_t seed) {
  const BalancePoint b = solve_balance(1.0, 1.0, p);
  return init_micro(b.m_e, b.m_i, 1.0, 1.0, p, seed);
}

struct Moments {
  double mean;
  double var;
};

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double v = 0.0;
  for (const double y : x) v += (y - m) * (y - m);
  return {m, v / (n - 1)};
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic series).
double ks_p_value(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size() * b.size()) / static_cast<double>(a.size() + b.size());
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST(InitMicro, ZeroVarianceIsExact) {
  const NetworkParams p = small_reference(50);
  const MicroState s = init_micro(0.3, -1.2, 0.0, 0.0, p, 1);
  for (std::size_t j = 0; j < 50; ++j) {
    EXPECT_EQ(s.u_e[j], 0.3);
    EXPECT_EQ(s.u_i[j], -1.2);
  }
  EXPECT_EQ(s.t, 0.0);
}

TEST(InitMicro, SampleMomentsWithinCltBounds) {
  const NetworkParams p = small_reference(10000);
  const MacroState m = macro_of_micro(init_micro(2.0, 0.0, 1.0, 0.5, p, 42));
  EXPECT_NEAR(m.v_e, 2.0, 0.04);
  EXPECT_NEAR(m.K_e, 1.0, 0.03);
  EXPECT_NEAR(m.K_i, 0.5, 0.03);
}

TEST(InitMicro, SameSeedSameState) {
  const NetworkParams p = small_reference(1000);
  EXPECT_EQ(init_micro(1, 2, 3, 4, p, 9), init_micro(1, 2, 3, 4, p, 9));
  EXPECT_NE(init_micro(1, 2, 3, 4, p, 9), init_micro(1, 2, 3, 4, p, 10));
}

TEST(SimConfig, Validation) {
  EXPECT_THROW(fixed_config(0.0, 1e-3, 1).validate(), std::invalid_argument);
  EXPECT_THROW(fixed_config(1.0, 0.0, 1).validate(), std::invalid_argument);
  EXPECT_THROW(fixed_config(1.0, 1e-3, 1, 0.0).validate(), std::invalid_argument);
  const NetworkParams p = small_reference(10);
  const MicroState s = init_micro(0, 0, 1, 1, p, 1);
  EXPECT_THROW(simulate_fixed(s, p, fixed_config(1.0005, 1e-3, 1)), std::invalid_argument);
  EXPECT_THROW(simulate_fixed(s, small_reference(11), fixed_config(1.0, 1e-3, 1)),
               std::invalid_argument);
}

// Constant rates, no decay: accepted spikes into one target on a channel
// with excitatory source are Poisson(n c T).
TEST(SimulateExact, ConstantRateCountsArePoisson) {
  NetworkParams p = small_reference(100);
  p.coupling = {1.0, 0.0, 0.0, 0.0};
  for (const ChannelId ch : kChannels) p.f(ch) = FiringRate::constant(1.0);
  p.tau_e = p.tau_i = std::numeric_limits<double>::infinity();
  const MicroState init(std::vector<double>(100, 0.0), std::vector<double>(100, 0.0));

  const int trials = 2000;
  std::vector<double> counts;
  counts.reserve(trials);
  for (int r = 0; r < trials; ++r) {
    double c = 0;
    simulate_exact(init, p, exact_config(1.0, 1000 + r, 1.0), [&](const SpikeEvent& e) {
      if (e.accepted && e.target == 0 && e.channel == kEE) c += 1;
    });
    counts.push_back(c);
  }
  const Moments m = moments(counts);
  EXPECT_NEAR(m.mean, 100.0, 1.0);
  EXPECT_NEAR(m.var, 100.0, 10.0);

  // chi-square on bins [0,80), 80..119 pooled in fives, [120, inf)
  std::vector<double> edges = {0};
  for (int k = 80; k <= 120; k += 5) edges.push_back(k);
  edges.push_back(1e9);
  std::vector<double> pmf(400);
  pmf[0] = std::exp(-100.0);
  double logp = -100.0;
  for (int k = 1; k < 400; ++k) {
    logp += std::log(100.0 / k);
    pmf[k] = std::exp(logp);
  }
  double stat = 0.0;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    double expected = 0.0;
    for (int k = static_cast<int>(edges[b]); k < std::min(400.0, edges[b + 1]); ++k) expected += pmf[k];
    expected *= trials;
    const auto observed = std::count_if(counts.begin(), counts.end(), [&](double c) {
      return c >= edges[b] && c < edges[b + 1];
    });
    stat += (observed - expected) * (observed - expected) / expected;
  }
  const double pval = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(static_cast<double>(edges.size() - 2)), stat));
  EXPECT_GT(pval, 1e-3);
}

TEST(SimulateExact, ZeroCouplingIsPureDecay) {
  NetworkParams p = small_reference(20);
  p.coupling = {0, 0, 0, 0};
  p.tau_i = 0.5;
  const MicroState init = init_micro(1.0, -2.0, 1.0, 0.3, p, 3);
  const SimResult r = simulate_exact(init, p, exact_config(1.5, 7, 0.5));
  EXPECT_EQ(r.proposals, 0u);
  for (std::size_t j = 0; j < 20; ++j) {
    EXPECT_NEAR(r.final_state.u_e[j], init.u_e[j] * std::exp(-1.5), 1e-12);
    EXPECT_NEAR(r.final_state.u_i[j], init.u_i[j] * std::exp(-3.0), 1e-12);
  }
}

TEST(SimulateFixed, ZeroCouplingIsPureDecay) {
  NetworkParams p = small_reference(20);
  p.coupling = {0, 0, 0, 0};
  const MicroState init = init_micro(1.0, -2.0, 1.0, 0.3, p, 3);
  const SimResult r = simulate_fixed(init, p, fixed_config(2.0, 1e-3, 7));
  for (std::size_t j = 0; j < 20; ++j) {
    EXPECT_NEAR(r.final_state.u_e[j], init.u_e[j] * std::exp(-2.0), 1e-12);
  }
  const MacroState m0 = r.trajectory.states.front();
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    EXPECT_NEAR(r.trajectory.states[k].K_e, m0.K_e * std::exp(-2.0 * r.trajectory.times[k]), 1e-12);
  }
}

TEST(Simulate, BothMethodsAreDeterministic) {
  const NetworkParams p = small_reference(60);
  const MicroState init = reference_init(p, 5);
  const auto a = simulate_exact(init, p, exact_config(0.5, 11));
  const auto b = simulate_exact(init, p, exact_config(0.5, 11));
  EXPECT_EQ(a.trajectory.states, b.trajectory.states);
  EXPECT_EQ(a.final_state, b.final_state);
  const auto c = simulate_fixed(init, p, fixed_config(0.5, 1e-3, 11));
  const auto d = simulate_fixed(init, p, fixed_config(0.5, 1e-3, 11));
  EXPECT_EQ(c.trajectory.states, d.trajectory.states);
  EXPECT_EQ(c.final_state, d.final_state);
}

TEST(SimulateFixed, ThreadCountDoesNotChangeResult) {
  const NetworkParams p = small_reference(3000);
  const MicroState init = reference_init(p, 5);
  SimConfig one = fixed_config(0.05, 1e-3, 3);
  one.threads = 1;
  SimConfig four = one;
  four.threads = 4;
  EXPECT_EQ(simulate_fixed(init, p, one).final_state, simulate_fixed(init, p, four).final_state);
}

TEST(Simulate, RecordGridMatchesStride) {
  const NetworkParams p = small_reference(2);
  const MicroState init = reference_init(p, 1);
  for (const auto& cfg : {fixed_config(1.0, 1e-3, 1, 0.05), exact_config(1.0, 1, 0.05)}) {
    const SimResult r = simulate(init, p, cfg);
    ASSERT_EQ(r.trajectory.size(), 21u);
    for (std::size_t k = 0; k < 21; ++k) EXPECT_EQ(r.trajectory.times[k], 0.05 * k);
  }
}

TEST(SimulateFixed, WarnsInCoarsePoissonRegime) {
  const NetworkParams p = small_reference(100);
  const SimResult r = simulate_fixed(reference_init(p, 1), p, fixed_config(2.0, 1.0, 1, 1.0));
  EXPECT_GT(r.max_step_mean, 50.0);
  EXPECT_EQ(r.warnings.size(), 1u);
}

// The exact simulator is the oracle for the fixed-step scheme.
TEST(SimulateFixed, MeanTrajectoryMatchesExact) {
  const NetworkParams p = small_reference(100);
  const int seeds = 20;
  std::vector<std::vector<double>> fixed_ve, exact_ve;
  for (int s = 0; s < seeds; ++s) {
    const MicroState init = reference_init(p, 500 + s);
    const auto a = simulate_fixed(init, p, fixed_config(2.0, 1e-3, 500 + s, 0.1));
    const auto b = simulate_exact(init, p, exact_config(2.0, 900 + s, 0.1));
    std::vector<double> x, y;
    for (const auto& m : a.trajectory.states) x.push_back(m.v_e);
    for (const auto& m : b.trajectory.states) y.push_back(m.v_e);
    fixed_ve.push_back(x);
    exact_ve.push_back(y);
  }
  for (std::size_t k = 0; k < fixed_ve[0].size(); ++k) {
    std::vector<double> x, y;
    for (int s = 0; s < seeds; ++s) {
      x.push_back(fixed_ve[s][k]);
      y.push_back(exact_ve[s][k]);
    }
    const Moments a = moments(x), b = moments(y);
    const double se = std::sqrt(a.var / seeds + b.var / seeds);
    EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * se + 1e-12) << "t index " << k;
  }
}

TEST(SimulateFixed, HalvingStepShiftsVarianceWithinNoise) {
  const NetworkParams p = small_reference(100);
  const int seeds = 20;
  std::vector<double> coarse, fine;
  for (int s = 0; s < seeds; ++s) {
    const MicroState init = reference_init(p, 40 + s);
    coarse.push_back(simulate_fixed(init, p, fixed_config(2.0, 1e-3, 40 + s, 0.1)).trajectory.states.back().K_e);
    fine.push_back(simulate_fixed(init, p, fixed_config(2.0, 5e-4, 40 + s, 0.1)).trajectory.states.back().K_e);
  }
  const Moments a = moments(coarse), b = moments(fine);
  EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * std::sqrt(a.var / seeds + b.var / seeds));
}

TEST(SimulateFixed, SymmetricNetworkHasSymmetricEndpoints) {
  NetworkParams p = small_reference(100);
  p.coupling = {1.0, 1.0, 1.0, 1.0};
  p.f(kEE) = p.f(kIE) = TanhAffine{0.5, 2, 1};
  p.f(kEI) = p.f(kII) = TanhAffine{0.5, 2, 1};
  std::vector<double> ve, vi;
  for (int s = 0; s < 50; ++s) {
    const MicroState init = init_micro(0.0, 0.0, 1.0, 1.0, p, 70 + s);
    const auto r = simulate_fixed(init, p, fixed_config(1.0, 1e-3, 70 + s, 0.5));
    ve.push_back(r.trajectory.states.back().v_e);
    vi.push_back(r.trajectory.states.back().v_i);
  }
  EXPECT_GT(ks_p_value(ve, vi), 1e-3);
}

TEST(EmpiricalTrajectory, ZeroCouplingVarianceDecays) {
  NetworkParams p = small_reference(200);
  p.coupling = {0, 0, 0, 0};
  const MicroState init = init_micro(0.5, 0.5, 2.0, 1.0, p, 8);
  const auto traj = empirical_trajectory(simulate_fixed(init, p, fixed_config(1.0, 1e-3, 8)).trajectory);
  const double K0 = traj.path.states.front().K_e;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(traj.path.states[k].K_e, K0 * std::exp(-2.0 * traj.path.times[k]), 1e-12);
  }
  EXPECT_FALSE(traj.eta_hit.has_value());
}
