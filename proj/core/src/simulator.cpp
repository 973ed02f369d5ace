#include "bnet/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bnet/parallel.hpp"
#include "bnet/random.hpp"

namespace bnet {

namespace {

constexpr double kGridSlack = 1e-9;
constexpr double kPoissonRegimeLimit = 50.0;

// Number of whole `step`s in `span`, rejecting spans that are not multiples.
long whole_steps(double span, double step, const char* what) {
  const double ratio = span / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > kGridSlack * std::max(1.0, ratio) || rounded < 1.0) {
    throw std::invalid_argument(fmt::format("{} ({}) is not a multiple of dt ({})", what, span, step));
  }
  return static_cast<long>(rounded);
}

// Record times k * stride, k = 0, 1, ..., up to T.
std::vector<double> record_grid(double T, double stride) {
  const auto count = static_cast<long>(std::floor(T / stride * (1.0 + kGridSlack) + kGridSlack));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count) + 1);
  for (long k = 0; k <= count; ++k) grid.push_back(static_cast<double>(k) * stride);
  return grid;
}

// Moments of the state decayed to `time` without touching it.
MacroState macro_at(const MicroState& s, double time, double tau_e, double tau_i) {
  auto moments = [&](const std::vector<double>& u, const std::vector<double>& last, double tau) {
    const double n = static_cast<double>(u.size());
    double mean = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      mean += last[j] == time ? u[j] : u[j] * std::exp(-(time - last[j]) / tau);
    }
    mean /= n;
    double var = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double x = last[j] == time ? u[j] : u[j] * std::exp(-(time - last[j]) / tau);
      var += (x - mean) * (x - mean);
    }
    return std::pair{mean, var / n};
  };
  const auto [ve, ke] = moments(s.u_e, s.last_e, tau_e);
  const auto [vi, ki] = moments(s.u_i, s.last_i, tau_i);
  return MacroState{ve, vi, ke, ki};
}

void check_init(const MicroState& init, const NetworkParams& p) {
  if (init.size() != p.n) {
    throw std::invalid_argument(
        fmt::format("initial state has {} neurons per population, params say {}", init.size(), p.n));
  }
  if (!init.synced()) throw std::invalid_argument("initial state must be synced");
}

}  // namespace

void SimConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SimConfig: T must be positive");
  if (!(record_stride > 0.0)) throw std::invalid_argument("SimConfig: record_stride must be positive");
  if (const auto* fixed = std::get_if<FixedStepMethod>(&method)) {
    if (!(fixed->dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
  }
}

MicroState init_micro(double m_e, double m_i, double k_e, double k_i, const NetworkParams& p,
                      std::uint64_t seed) {
  if (!(k_e >= 0.0) || !(k_i >= 0.0)) {
    throw std::invalid_argument("init_micro: variances must be non-negative");
  }
  if (p.n == 0) throw std::invalid_argument("init_micro: n must be positive");
  auto draw = [&](Population pop, double m, double k) {
    CounterRng g(seed, stream_id(StreamTag::kInit, index_of(pop), 0));
    std::normal_distribution<double> z;
    const double s = std::sqrt(k);
    std::vector<double> u(p.n);
    for (auto& x : u) x = m + s * z(g);
    return u;
  };
  return MicroState(draw(Population::kExcitatory, m_e, k_e),
                    draw(Population::kInhibitory, m_i, k_i), 0.0);
}

SimResult simulate_exact(const MicroState& init, const NetworkParams& p, const SimConfig& cfg,
                         const SpikeSink& sink) {
  cfg.validate();
  p.validate();
  check_init(init, p);
  if (p.n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("simulate_exact: n too large");
  }

  SimResult out;
  MicroState s = init;
  const auto n32 = static_cast<std::uint32_t>(p.n);
  const double n = static_cast<double>(p.n);
  const double jump_scale = 1.0 / std::sqrt(n);

  struct Clock {
    ChannelId ch;
    double rate;
    double bound;
    double jump;
    double next;
    CounterRng rng;
  };
  std::vector<Clock> clocks;
  for (const ChannelId ch : kChannels) {
    const double bound = p.f(ch).bound();
    if (p.C(ch) == 0.0 || !(bound > 0.0)) continue;
    const double sign = ch.source == Population::kExcitatory ? 1.0 : -1.0;
    Clock c{ch, n * n * bound, bound, sign * p.C(ch) * jump_scale, 0.0,
            CounterRng(cfg.seed, stream_id(StreamTag::kExact, ch.index(), 0))};
    c.next = standard_exponential(c.rng) / c.rate;
    clocks.push_back(std::move(c));
  }

  const std::vector<double> grid = record_grid(cfg.T, cfg.record_stride);
  std::size_t next_record = 0;
  auto record_until = [&](double t) {
    while (next_record < grid.size() && grid[next_record] <= t) {
      out.trajectory.push(grid[next_record], macro_at(s, grid[next_record], p.tau_e, p.tau_i));
      ++next_record;
    }
  };

  for (;;) {
    auto it = std::min_element(clocks.begin(), clocks.end(),
                               [](const Clock& a, const Clock& b) { return a.next < b.next; });
    if (it == clocks.end() || it->next > cfg.T) break;
    Clock& c = *it;
    const double t = c.next;
    record_until(std::nextafter(t, -std::numeric_limits<double>::infinity()));

    const std::uint32_t j = uniform_index(c.rng, n32);
    const std::uint32_t k = uniform_index(c.rng, n32);
    const double source = s.decay_to(c.ch.source, k, t, p.tau(c.ch.source));
    const double rate = p.f(c.ch)(source);
    if (rate > c.bound * (1.0 + 1e-12)) {
      throw std::domain_error(fmt::format("rate {} exceeds bound {} on channel {}", rate, c.bound,
                                          c.ch.name()));
    }
    const bool accept = uniform01(c.rng) * c.bound < rate;
    ++out.proposals;
    if (accept) {
      ++out.accepted;
      s.decay_to(c.ch.target, j, t, p.tau(c.ch.target));
      s.u(c.ch.target)[j] += c.jump;
    }
    if (sink) sink(SpikeEvent{t, c.ch, j, accept});
    c.next = t + standard_exponential(c.rng) / c.rate;
  }
  record_until(cfg.T);
  s.sync(cfg.T, p.tau_e, p.tau_i);
  out.final_state = std::move(s);
  return out;
}

SimResult simulate_fixed(const MicroState& init, const NetworkParams& p, const SimConfig& cfg) {
  cfg.validate();
  p.validate();
  check_init(init, p);
  const auto* method = std::get_if<FixedStepMethod>(&cfg.method);
  if (!method) throw std::invalid_argument("simulate_fixed: config does not select FixedStep");
  const double dt = method->dt;
  const long steps = whole_steps(cfg.T, dt, "T");
  const long per_record = whole_steps(cfg.record_stride, dt, "record_stride");

  SimResult out;
  MicroState s = init;
  const std::size_t n = p.n;
  const double jump_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::array<double, 2> decay = {std::exp(-dt / p.tau_e), std::exp(-dt / p.tau_i)};

  auto record = [&](long step) {
    s.t = static_cast<double>(step) * dt;
    std::fill(s.last_e.begin(), s.last_e.end(), s.t);
    std::fill(s.last_i.begin(), s.last_i.end(), s.t);
    out.trajectory.push(static_cast<double>(step / per_record) * cfg.record_stride,
                        macro_of_micro(s));
  };
  record(0);

  const std::size_t workers = cfg.threads == 0 ? worker_count() : cfg.threads;
  const std::size_t block = 1024;
  const std::size_t blocks = (n + block - 1) / block;
  bool warned = false;

  for (long step = 1; step <= steps; ++step) {
    for (const auto pop : kPopulations) {
      for (auto& x : s.u(pop)) x *= decay[index_of(pop)];
    }

    std::array<double, 4> S{};
    for (const ChannelId ch : kChannels) {
      if (p.C(ch) == 0.0) continue;
      const FiringRate& f = p.f(ch);
      double sum = 0.0;
      for (const double x : s.u(ch.source)) sum += f(x);
      S[ch.index()] = sum;
    }
    const double step_max = *std::max_element(S.begin(), S.end()) * dt;
    out.max_step_mean = std::max(out.max_step_mean, step_max);
    if (step_max > kPoissonRegimeLimit && !warned) {
      out.warnings.push_back(fmt::format(
          "step {}: channel mean S*dt = {:.3g} exceeds {}; consider a smaller dt", step, step_max,
          kPoissonRegimeLimit));
      warned = true;
    }

    for (const auto target : kPopulations) {
      const ChannelId from_e{target, Population::kExcitatory};
      const ChannelId from_i{target, Population::kInhibitory};
      const PoissonSampler draw_e(S[from_e.index()] * dt);
      const PoissonSampler draw_i(S[from_i.index()] * dt);
      const double c_e = p.C(from_e) * jump_scale;
      const double c_i = p.C(from_i) * jump_scale;
      auto& u = s.u(target);
      parallel_for(
          blocks,
          [&](std::size_t b) {
            const std::size_t end = std::min(n, (b + 1) * block);
            for (std::size_t j = b * block; j < end; ++j) {
              CounterRng g(cfg.seed, stream_id(StreamTag::kFixed, index_of(target), j),
                           static_cast<std::uint32_t>(step));
              const auto ne = static_cast<double>(draw_e(g));
              const auto ni = static_cast<double>(draw_i(g));
              u[j] += c_e * ne - c_i * ni;
            }
          },
          workers);
    }
    if (step % per_record == 0) record(step);
  }
  s.t = cfg.T;
  std::fill(s.last_e.begin(), s.last_e.end(), s.t);
  std::fill(s.last_i.begin(), s.last_i.end(), s.t);
  out.final_state = std::move(s);
  return out;
}

SimResult simulate(const MicroState& init, const NetworkParams& p, const SimConfig& cfg,
                   const SpikeSink& sink) {
  if (std::holds_alternative<ExactMethod>(cfg.method)) return simulate_exact(init, p, cfg, sink);
  return simulate_fixed(init, p, cfg);
}

LimitTrajectory empirical_trajectory(const Trajectory& traj) {
  LimitTrajectory out;
  out.path = traj;
  return out;
}

}  // namespace bnet
