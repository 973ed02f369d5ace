#include "bnet/random.hpp"

#include <cmath>
#include <stdexcept>

namespace bnet {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;
constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;

constexpr double kInversionLimit = 10.0;

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  // ctr = (block, substream, stream_lo, stream_hi)
  ctr_ = {0, substream, static_cast<std::uint32_t>(stream),
          static_cast<std::uint32_t>(stream >> 32)};
}

void CounterRng::refill() {
  if (blocks_ > 0 && ctr_[0] == 0) throw std::overflow_error("CounterRng: stream exhausted");
  block_ = philox4x32_10(ctr_, key_);
  ++ctr_[0];
  ++blocks_;
  pos_ = 0;
}

double uniform01(CounterRng& g) {
  const std::uint64_t a = g() >> 5;
  const std::uint64_t b = g() >> 6;
  return static_cast<double>(a * 67108864ULL + b) * 0x1.0p-53;
}

std::uint32_t uniform_index(CounterRng& g, std::uint32_t n) {
  // Lemire's multiply-and-reject
  std::uint64_t m = static_cast<std::uint64_t>(g()) * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = (0u - n) % n;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(g()) * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

double standard_exponential(CounterRng& g) { return -std::log1p(-uniform01(g)); }

PoissonSampler::PoissonSampler(double mean) : mean_(mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("PoissonSampler: mean must be finite and non-negative");
  }
  rejection_ = mean >= kInversionLimit;
  if (!rejection_) {
    exp_neg_mean_ = std::exp(-mean);
    return;
  }
  log_mean_ = std::log(mean);
  const double s = std::sqrt(mean);
  b_ = 0.931 + 2.53 * s;
  a_ = -0.059 + 0.02483 * b_;
  inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
  v_r_ = 0.9277 - 3.6224 / (b_ - 2.0);
}

std::uint64_t PoissonSampler::operator()(CounterRng& g) const {
  if (mean_ == 0.0) return 0;
  if (!rejection_) {
    const double u = uniform01(g);
    std::uint64_t k = 0;
    double p = exp_neg_mean_;
    double cdf = p;
    while (u >= cdf) {
      ++k;
      p *= mean_ / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // tail below double resolution
      cdf = next;
    }
    return k;
  }
  for (;;) {
    const double u = uniform01(g) - 0.5;
    const double v = uniform01(g);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a_ / us + b_) * u + mean_ + 0.43);
    if (us >= 0.07 && v <= v_r_) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha_ / (a_ / (us * us) + b_));
    const double rhs = -mean_ + k * log_mean_ - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

}  // namespace bnet
