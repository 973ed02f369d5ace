#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bnet {

/// Philox4x32-10 counter-based generator. Output depends only on
/// (seed, stream, substream) and the position in the sequence, so streams can
/// be created in any order or on any thread.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  /// Number of 32-bit words produced so far.
  std::uint64_t draws() const { return blocks_ * 4 - (4 - pos_); }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> block_{};
  std::uint64_t blocks_ = 0;
  unsigned pos_ = 4;
};

/// One Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// Stream identifiers: (tag << 56) | (channel << 48) | index.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kExact = 2,
  kFixed = 3,
  kCompensated = 4,
  kModulus = 5,
  kStudy = 6,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t channel, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 56) | ((channel & 0xFF) << 48) |
         (index & 0xFFFFFFFFFFFFULL);
}

/// Uniform on [0, 1) with 53 random bits.
double uniform01(CounterRng& g);
/// Uniform on {0, ..., n-1} without modulo bias. n > 0.
std::uint32_t uniform_index(CounterRng& g, std::uint32_t n);
/// Exponential with unit rate.
double standard_exponential(CounterRng& g);

/// Poisson sampler for a fixed mean: sequential inversion for small means,
/// Hoermann's PTRS rejection above. Holds no per-draw state, so one instance
/// may serve many generators.
class PoissonSampler {
 public:
  explicit PoissonSampler(double mean);
  double mean() const { return mean_; }
  std::uint64_t operator()(CounterRng& g) const;

 private:
  double mean_;
  double exp_neg_mean_ = 0.0;
  // PTRS constants
  double log_mean_ = 0.0;
  double b_ = 0.0;
  double a_ = 0.0;
  double inv_alpha_ = 0.0;
  double v_r_ = 0.0;
  bool rejection_ = false;
};

}  // namespace bnet
