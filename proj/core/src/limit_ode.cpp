#include "bnet/limit_ode.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bnet {

namespace {

class ProjectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MacroState project(MacroState m, const NetworkParams& p, double tol) {
  BalanceOptions opt;
  opt.tolerance = tol;
  opt.max_iterations = 50;
  const auto root = project_balance(m, p, opt);
  if (!root) {
    throw ProjectionFailure(
        fmt::format("projection onto F = 0 failed at K = ({:.6g}, {:.6g})", m.K_e, m.K_i));
  }
  m.v_e = root->m_e;
  m.v_i = root->m_i;
  return m;
}

// Advances K by `step * k.dK` and warm-starts v with the mean ODE before
// projecting back onto the constraint set.
MacroState stage(const MacroState& base, const LimitRhs& k, double step, const NetworkParams& p,
                 double tol) {
  MacroState s{base.v_e + step * k.dv_e, base.v_i + step * k.dv_i, base.K_e + step * k.dK_e,
               base.K_i + step * k.dK_i};
  return project(s, p, tol);
}

}  // namespace

LimitRhs limit_rhs(const MacroState& m, const NetworkParams& p, double det_floor) {
  const PopulationPair sigma = noise_Sigma(m, p);
  LimitRhs r;
  r.dK_e = -2.0 * m.K_e / p.tau_e + sigma.e;
  r.dK_i = -2.0 * m.K_i / p.tau_i + sigma.i;

  const Jacobian2x2 JK = jacobian_K(m, p);
  // b = J_K dK, dv = -J_v^{-1} b
  const double b_e = JK.a11 * r.dK_e + JK.a12 * r.dK_i;
  const double b_i = JK.a21 * r.dK_e + JK.a22 * r.dK_i;
  if (b_e == 0.0 && b_i == 0.0) return r;  // means are stationary whatever J_v is

  const Jacobian2x2 Jv = jacobian_v(m, p);
  const double det = Jv.det();
  if (!(std::abs(det) >= det_floor)) {
    throw SingularJacobianError(fmt::format("det J_v = {:.3e} below floor {:.1e}", det, det_floor),
                                det);
  }
  r.dv_e = -(Jv.a22 * b_e - Jv.a12 * b_i) / det;
  r.dv_i = -(-Jv.a21 * b_e + Jv.a11 * b_i) / det;
  return r;
}

LimitTrajectory integrate(const MacroState& start, const NetworkParams& p, double T, double h,
                          const IntegrateOptions& options) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate: step must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("integrate: horizon must be non-negative");
  p.validate();

  LimitTrajectory out;
  auto record = [&](double t, const ManifoldReport& r) {
    out.path.push(t, r.state);
    out.zetas.push_back(r.zeta);
    out.det_Jvs.push_back(r.det_Jv);
    out.residuals.push_back(r.residual);
  };
  auto stop = [&](double t, std::string reason) {
    out.eta_hit = t;
    out.eta_reason = std::move(reason);
  };

  const ManifoldReport first = classify(start, p, options.residual_tol);
  record(0.0, first);
  if (!first.in_U && options.stop_on_exit) {
    stop(0.0, "initial state is not on the balanced manifold");
    return out;
  }

  const auto steps = static_cast<long>(std::max(1.0, std::ceil(T / h - 1e-9)));
  const double dt = T / static_cast<double>(steps);
  const double tol = options.projection_tol;
  MacroState m = start;
  for (long n = 1; n <= steps; ++n) {
    const double t_prev = out.path.times.back();
    const double t = static_cast<double>(n) * dt;
    MacroState next;
    try {
      const LimitRhs k1 = limit_rhs(m, p, options.det_floor);
      const LimitRhs k2 = limit_rhs(stage(m, k1, 0.5 * dt, p, tol), p, options.det_floor);
      const LimitRhs k3 = limit_rhs(stage(m, k2, 0.5 * dt, p, tol), p, options.det_floor);
      const LimitRhs k4 = limit_rhs(stage(m, k3, dt, p, tol), p, options.det_floor);
      const double w = dt / 6.0;
      next.K_e = m.K_e + w * (k1.dK_e + 2.0 * k2.dK_e + 2.0 * k3.dK_e + k4.dK_e);
      next.K_i = m.K_i + w * (k1.dK_i + 2.0 * k2.dK_i + 2.0 * k3.dK_i + k4.dK_i);
      next.v_e = m.v_e + w * (k1.dv_e + 2.0 * k2.dv_e + 2.0 * k3.dv_e + k4.dv_e);
      next.v_i = m.v_i + w * (k1.dv_i + 2.0 * k2.dv_i + 2.0 * k3.dv_i + k4.dv_i);
      next = project(next, p, tol);
      const double gap = std::max(std::abs(next.v_e - (m.v_e + dt * k1.dv_e)),
                                  std::abs(next.v_i - (m.v_i + dt * k1.dv_i)));
      out.max_predictor_gap = std::max(out.max_predictor_gap, gap);
    } catch (const SingularJacobianError& e) {
      stop(t_prev, e.what());
      break;
    } catch (const ProjectionFailure& e) {
      stop(t_prev, e.what());
      break;
    }

    const ManifoldReport r = classify(next, p, options.residual_tol);
    record(t, r);
    m = next;
    if (!options.stop_on_exit) continue;
    if (!(std::abs(r.det_Jv) >= options.det_floor)) {
      stop(t, fmt::format("det J_v = {:.3e} below floor", r.det_Jv));
      break;
    }
    if (!r.in_U) {
      stop(t, "left the balanced manifold");
      break;
    }
  }
  return out;
}

std::optional<double> detect_eta(const LimitTrajectory& traj, double det_floor,
                                 double zeta_floor) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.det_Jvs[k] <= det_floor || traj.zetas[k] <= zeta_floor) return traj.path.times[k];
  }
  return std::nullopt;
}

}  // namespace bnet
