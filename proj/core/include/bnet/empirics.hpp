#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnet/limit_ode.hpp"
#include "bnet/model.hpp"

namespace bnet {

class GridMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SupErrors {
  double v_e = 0.0;
  double v_i = 0.0;
  double K_e = 0.0;
  double K_i = 0.0;
  /// sup over the grid of |dv_e| + |dv_i| + |dK_e| + |dK_i|.
  double total = 0.0;
};

/// Suprema over the empirical grid of |emp - lim|, with the limit trajectory
/// interpolated linearly. Throws GridMismatchError when an empirical time
/// falls outside the limit grid.
SupErrors sup_error(const Trajectory& emp, const LimitTrajectory& lim);

/// Limit state at time t by linear interpolation.
MacroState interpolate(const Trajectory& path, double t);

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against erfc. Returns -inf / +inf at 0 / 1.
double inverse_normal_cdf(double p);

/// 1-D Wasserstein-1 distance between the empirical law of `samples` and
/// N(mean, var), via the quantile grid (j - 1/2) / N.
double wasserstein1_to_gaussian(std::span<const double> samples, double mean, double var);

struct ConvergenceRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double sup_err_v_e = 0.0;
  double sup_err_v_i = 0.0;
  double sup_err_K_e = 0.0;
  double sup_err_K_i = 0.0;
  double sup_err_total = 0.0;
  double w1_e_final = 0.0;
  double w1_i_final = 0.0;
  std::string error;  // non-empty when the row failed; numbers are NaN then
};

/// Initial variances, horizon and discretisation shared by every row.
struct StudySetup {
  double k_e = 1.0;
  double k_i = 1.0;
  double T = 5.0;
  double h = 1e-3;
  double dt = 1e-3;
  double record_stride = 0.01;
};

struct ConvergenceMedians {
  std::size_t n = 0;
  std::size_t rows = 0;  // successful rows
  double v_e = 0.0;
  double v_i = 0.0;
  double K_e = 0.0;
  double K_i = 0.0;
  double total = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // ordered by (n, seed) as given
  std::vector<ConvergenceMedians> medians;  // one per n, in the given order
  bool v_e_monotone = false;  // median sup_err_v_e non-increasing in n
  bool total_monotone = false;
  double v_e_ratio = 0.0;  // median at the first n over median at the last
  double total_ratio = 0.0;
};

double median(std::vector<double> values);

/// One fixed-step run per (n, seed) against a single limit trajectory; rows
/// run concurrently. Errors inside a row are recorded and the sweep goes on.
ConvergenceStudy convergence_study(const std::vector<std::size_t>& ns,
                                   const std::vector<std::uint64_t>& seeds,
                                   const NetworkParams& p, const StudySetup& setup);

}  // namespace bnet
