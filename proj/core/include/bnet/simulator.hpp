#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "bnet/limit_ode.hpp"
#include "bnet/model.hpp"

namespace bnet {

/// Event-driven thinning: exact law of the finite network, cost O(n^2 T).
struct ExactMethod {};

/// Aggregated per-target Poisson increments with start-of-step intensities.
struct FixedStepMethod {
  double dt = 1e-3;
};

struct SimConfig {
  std::variant<ExactMethod, FixedStepMethod> method = FixedStepMethod{};
  double T = 1.0;
  std::uint64_t seed = 0;
  double record_stride = 0.01;
  /// Threads for per-target updates in the fixed-step method; 0 means
  /// worker_count(). Does not affect results.
  std::size_t threads = 0;

  /// Throws std::invalid_argument on T <= 0, stride <= 0 or dt <= 0.
  void validate() const;
};

struct SpikeEvent {
  double t = 0.0;
  ChannelId channel = kEE;
  std::uint32_t target = 0;
  bool accepted = false;
};

using SpikeSink = std::function<void(const SpikeEvent&)>;

struct SimResult {
  Trajectory trajectory;  // macro samples at k * record_stride
  MicroState final_state;  // synced to T
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double max_step_mean = 0.0;  // fixed-step only: largest S * dt seen
  std::vector<std::string> warnings;
};

/// u_a[j] = m_a + sqrt(k_a) z_j with z_j standard normal from the seeded
/// per-population stream.
MicroState init_micro(double m_e, double m_i, double k_e, double k_i, const NetworkParams& p,
                      std::uint64_t seed);

/// Thinning simulator. Each channel (a, b) proposes at rate n^2 C_f, picks a
/// target j and source k uniformly and accepts with probability
/// f_ab(u_b,k(t)) / C_f; an accepted spike adds +-C_ab / sqrt(n) to u_a,j.
/// An infinite tau disables decay.
SimResult simulate_exact(const MicroState& init, const NetworkParams& p, const SimConfig& cfg,
                         const SpikeSink& sink = {});

/// Per step: decay, freeze S_ab = sum_k f_ab(u_b,k), then draw
/// N ~ Poisson(S dt) per target and channel. T and record_stride must be
/// integer multiples of dt.
SimResult simulate_fixed(const MicroState& init, const NetworkParams& p, const SimConfig& cfg);

/// Dispatches on cfg.method. The sink only sees events from the exact method.
SimResult simulate(const MicroState& init, const NetworkParams& p, const SimConfig& cfg,
                   const SpikeSink& sink = {});

/// Empirical means and variances on the record grid, in the same shape as a
/// limit trajectory (no manifold diagnostics).
LimitTrajectory empirical_trajectory(const Trajectory& traj);

}  // namespace bnet
