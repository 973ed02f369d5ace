#include "bnet/empirics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bnet/manifold.hpp"
#include "bnet/parallel.hpp"
#include "bnet/simulator.hpp"

namespace bnet {

namespace {

constexpr double kTimeSlack = 1e-9;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

MacroState interpolate(const Trajectory& path, double t) {
  if (path.empty()) throw GridMismatchError("interpolate: empty trajectory");
  const auto& ts = path.times;
  const double slack = kTimeSlack * std::max(1.0, std::abs(ts.back()));
  if (t < ts.front() - slack || t > ts.back() + slack) {
    throw GridMismatchError(
        fmt::format("time {} outside limit grid [{}, {}]", t, ts.front(), ts.back()));
  }
  auto hi = std::upper_bound(ts.begin(), ts.end(), t);
  if (hi == ts.begin()) return path.states.front();
  if (hi == ts.end()) return path.states.back();
  const auto k = static_cast<std::size_t>(hi - ts.begin());
  const double t0 = ts[k - 1];
  const double t1 = ts[k];
  const double w = (t - t0) / (t1 - t0);
  const MacroState& a = path.states[k - 1];
  const MacroState& b = path.states[k];
  auto lerp = [w](double x, double y) { return x + w * (y - x); };
  return {lerp(a.v_e, b.v_e), lerp(a.v_i, b.v_i), lerp(a.K_e, b.K_e), lerp(a.K_i, b.K_i)};
}

SupErrors sup_error(const Trajectory& emp, const LimitTrajectory& lim) {
  SupErrors out;
  for (std::size_t k = 0; k < emp.size(); ++k) {
    const MacroState ref = interpolate(lim.path, emp.times[k]);
    const MacroState& x = emp.states[k];
    const double de = std::abs(x.v_e - ref.v_e);
    const double di = std::abs(x.v_i - ref.v_i);
    const double dKe = std::abs(x.K_e - ref.K_e);
    const double dKi = std::abs(x.K_i - ref.K_i);
    out.v_e = std::max(out.v_e, de);
    out.v_i = std::max(out.v_i, di);
    out.K_e = std::max(out.K_e, dKe);
    out.K_i = std::max(out.K_i, dKi);
    out.total = std::max(out.total, de + di + dKe + dKi);
  }
  return out;
}

double inverse_normal_cdf(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw std::domain_error("inverse_normal_cdf: probability outside [0, 1]");
  }
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step; the upper tail is refined through symmetry to keep erfc accurate.
  const bool upper = x > 0.0;
  const double xs = upper ? -x : x;
  const double ps = upper ? 1.0 - p : p;
  const double e = 0.5 * std::erfc(-xs / std::numbers::sqrt2) - ps;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * xs * xs);
  const double refined = xs - u / (1.0 + 0.5 * xs * u);
  return upper ? -refined : refined;
}

double wasserstein1_to_gaussian(std::span<const double> samples, double mean, double var) {
  if (samples.empty()) throw std::invalid_argument("wasserstein1_to_gaussian: no samples");
  if (!(var >= 0.0)) throw std::domain_error("wasserstein1_to_gaussian: negative variance");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double N = static_cast<double>(x.size());
  const double s = std::sqrt(var);
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double q = inverse_normal_cdf((static_cast<double>(j) + 0.5) / N);
    sum += std::abs(x[j] - (mean + s * q));
  }
  return sum / N;
}

double median(std::vector<double> values) {
  if (values.empty()) return nan();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

ConvergenceStudy convergence_study(const std::vector<std::size_t>& ns,
                                   const std::vector<std::uint64_t>& seeds,
                                   const NetworkParams& p, const StudySetup& setup) {
  if (ns.empty() || seeds.empty()) {
    throw std::invalid_argument("convergence_study: need at least one n and one seed");
  }
  const BalancePoint m = solve_balance(setup.k_e, setup.k_i, p);
  const MacroState start{m.m_e, m.m_i, setup.k_e, setup.k_i};
  const LimitTrajectory lim = integrate(start, p, setup.T, setup.h);
  if (lim.eta_hit) {
    throw std::runtime_error(fmt::format("limit trajectory leaves the balanced manifold at t = {}: {}",
                                         *lim.eta_hit, lim.eta_reason));
  }
  const MacroState end = lim.path.states.back();

  ConvergenceStudy study;
  for (const std::size_t n : ns) {
    for (const std::uint64_t seed : seeds) {
      ConvergenceRow row;
      row.n = n;
      row.seed = seed;
      study.rows.push_back(row);
    }
  }

  parallel_for(study.rows.size(), [&](std::size_t r) {
    ConvergenceRow& row = study.rows[r];
    try {
      NetworkParams pn = p;
      pn.n = row.n;
      SimConfig cfg;
      cfg.method = FixedStepMethod{setup.dt};
      cfg.T = setup.T;
      cfg.seed = row.seed;
      cfg.record_stride = setup.record_stride;
      cfg.threads = 1;
      const SimResult sim =
          simulate_fixed(init_micro(m.m_e, m.m_i, setup.k_e, setup.k_i, pn, row.seed), pn, cfg);
      const SupErrors e = sup_error(sim.trajectory, lim);
      row.sup_err_v_e = e.v_e;
      row.sup_err_v_i = e.v_i;
      row.sup_err_K_e = e.K_e;
      row.sup_err_K_i = e.K_i;
      row.sup_err_total = e.total;
      row.w1_e_final = wasserstein1_to_gaussian(sim.final_state.u_e, end.v_e, end.K_e);
      row.w1_i_final = wasserstein1_to_gaussian(sim.final_state.u_i, end.v_i, end.K_i);
    } catch (const std::exception& ex) {
      row.error = ex.what();
      row.sup_err_v_e = row.sup_err_v_i = row.sup_err_K_e = row.sup_err_K_i = nan();
      row.sup_err_total = row.w1_e_final = row.w1_i_final = nan();
    }
  });

  for (const std::size_t n : ns) {
    if (std::any_of(study.medians.begin(), study.medians.end(),
                    [n](const ConvergenceMedians& x) { return x.n == n; })) {
      continue;
    }
    std::vector<double> ve, vi, ke, ki, tot;
    for (const auto& row : study.rows) {
      if (row.n != n || !row.error.empty()) continue;
      ve.push_back(row.sup_err_v_e);
      vi.push_back(row.sup_err_v_i);
      ke.push_back(row.sup_err_K_e);
      ki.push_back(row.sup_err_K_i);
      tot.push_back(row.sup_err_total);
    }
    study.medians.push_back(
        {n, ve.size(), median(ve), median(vi), median(ke), median(ki), median(tot)});
  }

  study.v_e_monotone = study.total_monotone = true;
  for (std::size_t k = 1; k < study.medians.size(); ++k) {
    const auto& a = study.medians[k - 1];
    const auto& b = study.medians[k];
    if (!(b.v_e <= a.v_e)) study.v_e_monotone = false;
    if (!(b.total <= a.total)) study.total_monotone = false;
  }
  study.v_e_ratio = study.medians.front().v_e / study.medians.back().v_e;
  study.total_ratio = study.medians.front().total / study.medians.back().total;
  return study;
}

}  // namespace bnet
