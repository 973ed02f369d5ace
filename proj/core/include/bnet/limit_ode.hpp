#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnet/manifold.hpp"
#include "bnet/model.hpp"

namespace bnet {

struct LimitRhs {
  double dv_e = 0.0;
  double dv_i = 0.0;
  double dK_e = 0.0;
  double dK_i = 0.0;
};

/// Hydrodynamic vector field on the balanced manifold:
///   dK = -2K/tau + Sigma,   dv = -J_v^{-1} J_K dK.
/// Throws SingularJacobianError when |det J_v| < det_floor.
LimitRhs limit_rhs(const MacroState& m, const NetworkParams& p, double det_floor = 1e-10);

/// Limit trajectory; every recorded state satisfies the balance constraints.
struct LimitTrajectory {
  Trajectory path;
  std::vector<double> zetas;
  std::vector<double> det_Jvs;
  std::vector<PopulationPair> residuals;
  std::optional<double> eta_hit;
  std::string eta_reason;
  /// Largest |v_projected - v_euler| over the run, where v_euler is the
  /// explicit Euler step of the mean ODE.
  double max_predictor_gap = 0.0;

  std::size_t size() const { return path.size(); }
};

struct IntegrateOptions {
  double det_floor = 1e-10;
  double residual_tol = 1e-10;
  double projection_tol = 1e-13;
  /// When false, leaving the balanced manifold (zeta <= 0 or a small det J_v)
  /// is recorded but does not stop the run. Only meaningful when J_K dK
  /// vanishes, e.g. for uncoupled networks.
  bool stop_on_exit = true;
};

/// Classical RK4 on (K_e, K_i); at every stage the means are re-solved on
/// {F_e = F_i = 0} by Newton, warm-started from the mean ODE. Stops at the
/// first recorded state that leaves the balanced manifold.
LimitTrajectory integrate(const MacroState& start, const NetworkParams& p, double T, double h,
                          const IntegrateOptions& options = {});

/// First recorded time with det J_v <= det_floor or zeta <= zeta_floor.
std::optional<double> detect_eta(const LimitTrajectory& traj, double det_floor = 1e-6,
                                 double zeta_floor = 1e-3);

}  // namespace bnet
