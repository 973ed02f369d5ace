#include "bnet/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>

#include "bnet/parallel.hpp"
#include "bnet/random.hpp"

namespace bnet {

namespace {

// Per-path work is small; hand trials out in chunks.
constexpr std::size_t kChunk = 64;

void parallel_chunks(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) body(k);
  });
}

// Sliding maximum over a window of indices whose left end only moves right.
class WindowMax {
 public:
  void push(std::size_t idx, double value) {
    while (!q_.empty() && q_.back().second <= value) q_.pop_back();
    q_.emplace_back(idx, value);
  }
  void drop_before(std::size_t idx) {
    while (!q_.empty() && q_.front().first < idx) q_.pop_front();
  }
  bool empty() const { return q_.empty(); }
  double max() const { return q_.front().second; }

 private:
  std::deque<std::pair<std::size_t, double>> q_;
};

}  // namespace

CompensatedPath simulate_compensated(std::size_t n, double T, std::uint64_t seed,
                                     const CompensatedOptions& options) {
  if (n == 0) throw std::invalid_argument("simulate_compensated: n must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("simulate_compensated: T must be positive");
  CompensatedPath path;
  path.n = n;
  path.horizon = T;
  path.normalized = options.normalize;
  const double rate = static_cast<double>(n);

  double sup = 0.0;
  if (!options.force_no_events) {
    CounterRng g(seed, stream_id(StreamTag::kCompensated, 0, options.stream));
    double t = standard_exponential(g) / rate;
    std::size_t k = 0;
    while (t <= T) {
      ++k;
      const double drift = rate * t;
      sup = std::max({sup, std::abs(static_cast<double>(k - 1) - drift),
                      std::abs(static_cast<double>(k) - drift)});
      if (options.keep_events) path.event_times.push_back(t);
      t += standard_exponential(g) / rate;
    }
    path.events = k;
  }
  sup = std::max(sup, std::abs(static_cast<double>(path.events) - rate * T));
  path.sup_abs = options.normalize ? sup / std::sqrt(rate) : sup;
  return path;
}

double modulus_of_continuity(const CompensatedPath& path, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("modulus_of_continuity: eps must be >= 0");
  if (path.event_times.size() != path.events) {
    throw std::invalid_argument("modulus_of_continuity: path was simulated without event times");
  }
  const auto& t = path.event_times;
  const double rate = static_cast<double>(path.n);
  const double S = path.horizon;
  const std::size_t N = t.size();

  // Upward: events a <= b within eps give (b - a + 1) - rate (t_b - t_a).
  double up = 0.0;
  {
    WindowMax best;  // max over a of rate t_a - a
    std::size_t lo = 0;
    for (std::size_t b = 0; b < N; ++b) {
      best.push(b, rate * t[b] - static_cast<double>(b));
      while (t[b] - t[lo] > eps) ++lo;
      best.drop_before(lo);
      up = std::max(up, static_cast<double>(b) + 1.0 + best.max() - rate * t[b]);
    }
  }

  // Downward, ending just before a jump or at the horizon: points
  // p_0 = 0, p_1..p_N = events, p_{N+1} = S. Starting at p_a (a <= N) and
  // ending at p_b^- (b >= 1) gives rate (p_b - p_a) - (b - a - 1).
  auto point = [&](std::size_t k) { return k == 0 ? 0.0 : (k <= N ? t[k - 1] : S); };
  double down = 0.0;
  {
    WindowMax best;  // max over a of a - rate p_a
    std::size_t lo = 0;
    std::size_t pushed = 0;
    for (std::size_t b = 1; b <= N + 1; ++b) {
      best.push(pushed, static_cast<double>(pushed) - rate * point(pushed));
      ++pushed;
      const double pb = point(b);
      while (pb - point(lo) > eps) ++lo;
      best.drop_before(lo);
      if (!best.empty()) {
        down = std::max(down, rate * pb - static_cast<double>(b) + 1.0 + best.max());
      }
    }
  }
  // Downward over a full window of length L = min(eps, S), started at 0 or
  // at a jump (which the half-open window (s, s + L] excludes).
  const double L = std::min(eps, S);
  if (L > 0.0) {
    auto count_in = [&](double s) {
      const auto first = std::upper_bound(t.begin(), t.end(), s);
      const auto last = std::upper_bound(t.begin(), t.end(), s + L);
      return static_cast<double>(last - first);
    };
    double fewest = count_in(0.0);
    for (std::size_t a = 0; a < N && t[a] <= S - L; ++a) fewest = std::min(fewest, count_in(t[a]));
    down = std::max(down, rate * L - fewest);
  }

  const double phi = std::max(up, down);
  return path.normalized ? phi / std::sqrt(rate) : phi;
}

double doob_tail_bound(double x, double T) { return 2.0 * std::exp(-x * x / (4.0 * T)); }

bool TailCheckResult::holds() const {
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(empirical_tail[i] <= bound[i] + slack[i])) return false;
  }
  return true;
}

TailCheckResult check_tail_bound(std::size_t n, double T, const std::vector<double>& x_grid,
                                 std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("check_tail_bound: trials must be positive");
  std::vector<double> sups(trials);
  CompensatedOptions opt;
  opt.keep_events = false;
  parallel_chunks(trials, [&](std::size_t k) {
    CompensatedOptions o = opt;
    o.stream = k;
    sups[k] = simulate_compensated(n, T, seed, o).sup_abs;
  });

  TailCheckResult r;
  r.x_grid = x_grid;
  r.trials = trials;
  const double root_n = std::sqrt(static_cast<double>(n));
  for (const double x : x_grid) {
    const double level = x * root_n;
    const auto hits = std::count_if(sups.begin(), sups.end(), [&](double s) { return s >= level; });
    const double bound = doob_tail_bound(x, T);
    r.empirical_tail.push_back(static_cast<double>(hits) / static_cast<double>(trials));
    r.bound.push_back(bound);
    r.slack.push_back(3.0 * std::sqrt(bound / static_cast<double>(trials)));
  }
  return r;
}

MocReport check_moc_concentration(std::size_t n_procs, std::vector<double> eps_grid, double delta,
                                  std::size_t trials, std::uint64_t seed, double horizon) {
  if (n_procs == 0 || trials == 0 || eps_grid.empty()) {
    throw std::invalid_argument("check_moc_concentration: empty configuration");
  }
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  const std::size_t E = eps_grid.size();
  std::vector<double> averages(trials * E);
  parallel_chunks(trials, [&](std::size_t r) {
    std::vector<double> sums(E, 0.0);
    for (std::size_t j = 0; j < n_procs; ++j) {
      CompensatedOptions o;
      o.normalize = true;
      o.stream = r * n_procs + j;
      const CompensatedPath path = simulate_compensated(n_procs, horizon, seed, o);
      for (std::size_t e = 0; e < E; ++e) sums[e] += modulus_of_continuity(path, eps_grid[e]);
    }
    for (std::size_t e = 0; e < E; ++e) {
      averages[r * E + e] = sums[e] / static_cast<double>(n_procs);
    }
  });

  MocReport rep;
  rep.eps_grid = eps_grid;
  rep.delta = delta;
  rep.n_procs = n_procs;
  rep.trials = trials;
  for (std::size_t e = 0; e < E; ++e) {
    std::size_t hits = 0;
    double total = 0.0;
    for (std::size_t r = 0; r < trials; ++r) {
      const double a = averages[r * E + e];
      total += a;
      if (a >= delta) ++hits;
    }
    rep.frequency.push_back(static_cast<double>(hits) / static_cast<double>(trials));
    rep.mean_phi.push_back(total / static_cast<double>(trials));
  }
  rep.non_increasing = std::is_sorted(rep.frequency.begin(), rep.frequency.end(), std::greater<>());
  rep.vanishes = rep.frequency.back() == 0.0;
  return rep;
}

ExpSquareReport check_expectation_square(std::size_t n, double b, const std::vector<double>& horizons,
                                         std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("check_expectation_square: need at least 2 trials");
  ExpSquareReport rep;
  rep.horizons = horizons;
  rep.b = b;
  rep.trials = trials;
  const double nn = static_cast<double>(n);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    std::vector<double> values(trials);
    parallel_chunks(trials, [&](std::size_t k) {
      CompensatedOptions o;
      o.keep_events = false;
      o.stream = h * trials + k;
      const double s = simulate_compensated(n, horizons[h], seed, o).sup_abs;
      values[k] = std::exp(b * s * s / nn);
    });
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(trials - 1);
    rep.mean.push_back(mean);
    rep.std_error.push_back(std::sqrt(var / static_cast<double>(trials)));
  }
  rep.monotone = std::all_of(rep.mean.begin(), rep.mean.end(), [](double m) { return m >= 1.0; });
  for (std::size_t a = 0; a < horizons.size(); ++a) {
    for (std::size_t c = 0; c < horizons.size(); ++c) {
      if (!(horizons[c] < horizons[a])) continue;
      const double se = std::hypot(rep.std_error[a], rep.std_error[c]);
      if (rep.mean[c] > rep.mean[a] + 2.0 * se) rep.monotone = false;
    }
  }
  return rep;
}

}  // namespace bnet
