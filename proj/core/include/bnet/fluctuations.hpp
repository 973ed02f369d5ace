#pragma once

#include <cstdint>
#include <vector>

namespace bnet {

/// Path of w(t) = y(nt) - nt on [0, T], y a unit-rate Poisson process.
/// Event times are on the t scale (rate n). With `normalized`, every
/// reported value is divided by sqrt(n).
struct CompensatedPath {
  std::size_t n = 1;
  double horizon = 1.0;
  bool normalized = false;
  std::vector<double> event_times;  // empty unless kept
  std::size_t events = 0;
  double sup_abs = 0.0;  // sup_{t <= T} |w(t)|, exact
};

struct CompensatedOptions {
  bool normalize = false;
  bool keep_events = true;
  bool force_no_events = false;  // test hook: pure compensator
  std::uint64_t stream = 0;      // independent path index under one seed
};

/// Exponential-gap simulation. The sup is taken over the values just before
/// and at each jump and at the horizon, where it is always attained.
CompensatedPath simulate_compensated(std::size_t n, double T, std::uint64_t seed,
                                     const CompensatedOptions& options = {});

/// phi_eps(w) = sup_{|s-t| <= eps} |w(s) - w(t)| over [0, horizon], exact.
/// Upward oscillations run from just before one jump to another jump;
/// downward ones start at 0 or at a jump and end just before a jump, at the
/// horizon, or eps later. Requires the path's event times.
double modulus_of_continuity(const CompensatedPath& path, double eps);

struct TailCheckResult {
  std::vector<double> x_grid;
  std::vector<double> empirical_tail;  // fraction of trials with sup|w| >= x sqrt(n)
  std::vector<double> bound;           // 2 exp(-x^2 / (4T))
  std::vector<double> slack;           // 3 sqrt(bound / trials)
  std::size_t trials = 0;

  /// empirical_tail[i] <= bound[i] + slack[i] for every i.
  bool holds() const;
};

double doob_tail_bound(double x, double T);

TailCheckResult check_tail_bound(std::size_t n, double T, const std::vector<double>& x_grid,
                                 std::size_t trials, std::uint64_t seed);

struct MocReport {
  std::vector<double> eps_grid;   // decreasing
  std::vector<double> frequency;  // P((1/n) sum_j phi_eps(w^j) >= delta), estimated
  std::vector<double> mean_phi;   // average of (1/n) sum_j phi_eps(w^j)
  double delta = 0.0;
  std::size_t n_procs = 0;
  std::size_t trials = 0;
  bool non_increasing = false;  // frequency non-increasing as eps decreases
  bool vanishes = false;        // zero frequency at the smallest eps
};

/// n_procs independent normalized paths at rate n_procs on [0, horizon] per
/// trial; eps_grid is sorted into decreasing order.
MocReport check_moc_concentration(std::size_t n_procs, std::vector<double> eps_grid, double delta,
                                  std::size_t trials, std::uint64_t seed, double horizon = 1.0);

struct ExpSquareReport {
  std::vector<double> horizons;    // as given
  std::vector<double> mean;        // E[exp(b sup|w|^2 / n)]
  std::vector<double> std_error;
  double b = 0.0;
  std::size_t trials = 0;
  /// mean[k+1] <= mean[k] + 2 combined standard errors whenever
  /// horizons[k+1] < horizons[k], and every mean >= 1.
  bool monotone = false;
};

ExpSquareReport check_expectation_square(std::size_t n, double b, const std::vector<double>& horizons,
                                         std::size_t trials, std::uint64_t seed);

}  // namespace bnet
