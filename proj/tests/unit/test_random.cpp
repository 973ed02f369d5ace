#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>
#include <vector>

#include "bnet/random.hpp"

using namespace bnet;

namespace {

double chi_square_p(double stat, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

}  // namespace

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswers) {
  using W = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32_10(W{0, 0, 0, 0}, {0, 0}), (W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10(W{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10(W{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, ReproducibleAndStreamSeparated) {
  CounterRng a(42, stream_id(StreamTag::kFixed, 1, 17), 3);
  CounterRng b(42, stream_id(StreamTag::kFixed, 1, 17), 3);
  CounterRng c(42, stream_id(StreamTag::kFixed, 1, 18), 3);
  CounterRng d(42, stream_id(StreamTag::kFixed, 1, 17), 4);
  CounterRng e(43, stream_id(StreamTag::kFixed, 1, 17), 3);
  int same_c = 0, same_d = 0, same_e = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a();
    ASSERT_EQ(x, b());
    same_c += x == c();
    same_d += x == d();
    same_e += x == e();
  }
  EXPECT_LE(same_c + same_d + same_e, 1);
  EXPECT_EQ(a.draws(), 1000u);
}

TEST(CounterRng, StreamIdsDoNotCollide) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t tag = 1; tag <= 6; ++tag) {
    for (std::uint64_t ch = 0; ch < 4; ++ch) {
      for (std::uint64_t j = 0; j < 100; ++j) {
        ids.insert(stream_id(static_cast<StreamTag>(tag), ch, j));
      }
    }
  }
  EXPECT_EQ(ids.size(), 6u * 4u * 100u);
}

TEST(Uniform, RangeAndMoments) {
  CounterRng g(1, 0);
  double sum = 0.0, sq = 0.0;
  const int N = 200000;
  for (int k = 0; k < N; ++k) {
    const double u = uniform01(g);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / N, 0.5, 4 * std::sqrt(1.0 / 12 / N));
  EXPECT_NEAR(sq / N, 1.0 / 3, 0.003);
}

TEST(Uniform, IndexIsUniform) {
  CounterRng g(2, 0);
  const std::uint32_t n = 37;
  std::vector<double> counts(n, 0.0);
  const int N = 370000;
  for (int k = 0; k < N; ++k) {
    const auto j = uniform_index(g, n);
    ASSERT_LT(j, n);
    counts[j] += 1;
  }
  double stat = 0.0;
  for (const double c : counts) stat += (c - N / n) * (c - N / n) / (N / n);
  EXPECT_GT(chi_square_p(stat, n - 1), 1e-3);
}

TEST(Exponential, MeanAndVariance) {
  CounterRng g(3, 0);
  double sum = 0.0, sq = 0.0;
  const int N = 200000;
  for (int k = 0; k < N; ++k) {
    const double x = standard_exponential(g);
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / N, 1.0, 4 * std::sqrt(1.0 / N));
  EXPECT_NEAR(sq / N - (sum / N) * (sum / N), 1.0, 0.03);
}

class PoissonLaw : public ::testing::TestWithParam<double> {};

TEST_P(PoissonLaw, MomentsAndGoodnessOfFit) {
  const double mean = GetParam();
  const PoissonSampler draw(mean);
  const int N = 100000;
  const int cap = static_cast<int>(mean + 10 * std::sqrt(mean) + 10);
  std::vector<double> counts(cap + 1, 0.0);
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < N; ++k) {
    CounterRng g(9, stream_id(StreamTag::kFixed, 0, k));
    const auto x = draw(g);
    sum += static_cast<double>(x);
    sq += static_cast<double>(x) * static_cast<double>(x);
    counts[std::min<std::size_t>(x, cap)] += 1;
  }
  const double m = sum / N;
  EXPECT_NEAR(m, mean, 4 * std::sqrt(mean / N));
  EXPECT_NEAR(sq / N - m * m, mean, 4 * mean * std::sqrt(2.0 / N) + 4 * std::sqrt(mean / N));

  // expected counts: pmf below cap, tail mass in the last bin
  std::vector<double> expected(cap + 1);
  double pk = std::exp(-mean), below = 0.0;
  for (int k = 0; k < cap; ++k) {
    expected[k] = pk * N;
    below += pk;
    pk *= mean / (k + 1);
  }
  expected[cap] = std::max(0.0, 1.0 - below) * N;

  // pool neighbouring bins until each expects at least 5
  double stat = 0.0;
  int bins = 0;
  double obs = 0.0, exp_count = 0.0;
  for (int k = 0; k <= cap; ++k) {
    obs += counts[k];
    exp_count += expected[k];
    if (exp_count >= 5.0 || k == cap) {
      if (exp_count > 0.0) {
        stat += (obs - exp_count) * (obs - exp_count) / exp_count;
        ++bins;
      }
      obs = exp_count = 0.0;
    }
  }
  EXPECT_GT(chi_square_p(stat, bins - 1), 1e-3) << "stat " << stat << " bins " << bins;
}

INSTANTIATE_TEST_SUITE_P(Means, PoissonLaw, ::testing::Values(0.3, 2.0, 8.0, 12.0, 45.0));

TEST(Poisson, ZeroMeanAndValidation) {
  CounterRng g(1, 1);
  EXPECT_EQ(PoissonSampler(0.0)(g), 0u);
  EXPECT_THROW(PoissonSampler(-1.0), std::invalid_argument);
}
