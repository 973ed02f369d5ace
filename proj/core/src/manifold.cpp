#include "bnet/manifold.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bnet {

namespace {

double max_abs(const PopulationPair& F) { return std::max(std::abs(F.e), std::abs(F.i)); }
double norm2(const PopulationPair& F) { return std::hypot(F.e, F.i); }

struct NewtonOutcome {
  BalancePoint point;
  bool converged = false;
  bool singular = false;
  double residual = std::numeric_limits<double>::infinity();
  double det = 0.0;
};

NewtonOutcome newton(MacroState m, const NetworkParams& p, const BalanceOptions& opt) {
  NewtonOutcome out;
  PopulationPair F = balance_F(m, p);
  for (int it = 0; it <= opt.max_iterations; ++it) {
    out.point = BalancePoint{m.v_e, m.v_i, F, it};
    out.residual = max_abs(F);
    if (out.residual <= opt.tolerance) {
      out.converged = true;
      return out;
    }
    if (it == opt.max_iterations || !std::isfinite(out.residual)) break;

    const Jacobian2x2 J = jacobian_v(m, p);
    out.det = J.det();
    double dv_e = 0.0;
    double dv_i = 0.0;
    if (std::abs(out.det) >= opt.singular_det) {
      dv_e = -(J.a22 * F.e - J.a12 * F.i) / out.det;
      dv_i = -(-J.a21 * F.e + J.a11 * F.i) / out.det;
    } else {
      // Rank-deficient J: minimum-norm least-squares step -J^T F / |J|_F^2.
      const double frob2 = J.a11 * J.a11 + J.a12 * J.a12 + J.a21 * J.a21 + J.a22 * J.a22;
      if (frob2 < opt.singular_det) {
        out.singular = true;
        break;
      }
      dv_e = -(J.a11 * F.e + J.a21 * F.i) / frob2;
      dv_i = -(J.a12 * F.e + J.a22 * F.i) / frob2;
    }

    const double current = norm2(F);
    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k <= opt.max_halvings; ++k, lambda *= 0.5) {
      MacroState trial = m;
      trial.v_e += lambda * dv_e;
      trial.v_i += lambda * dv_i;
      const PopulationPair Ft = balance_F(trial, p);
      if (norm2(Ft) < current) {
        m = trial;
        F = Ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return out;
}

}  // namespace

std::optional<BalancePoint> project_balance(const MacroState& m, const NetworkParams& p,
                                            const BalanceOptions& options) {
  const NewtonOutcome out = newton(m, p, options);
  if (!out.converged) return std::nullopt;
  return out.point;
}

BalancePoint solve_balance(double k_e, double k_i, const NetworkParams& p,
                           const BalanceOptions& options) {
  if (!(k_e >= 0.0) || !(k_i >= 0.0)) {
    throw std::invalid_argument("solve_balance: variances must be non-negative");
  }
  p.validate();

  double best_residual = std::numeric_limits<double>::infinity();
  bool all_singular = true;
  double last_det = 0.0;
  auto attempt = [&](double v_e, double v_i) -> std::optional<BalancePoint> {
    const NewtonOutcome out = newton(MacroState{v_e, v_i, k_e, k_i}, p, options);
    best_residual = std::min(best_residual, out.residual);
    if (!out.singular) all_singular = false;
    last_det = out.det;
    if (out.converged) return out.point;
    return std::nullopt;
  };

  if (options.guess) {
    if (auto root = attempt(options.guess->first, options.guess->second)) return *root;
  }

  struct Candidate {
    double norm;
    double v_e;
    double v_i;
  };
  std::vector<Candidate> grid;
  const int N = std::max(options.grid_points, 2);
  const double w = options.grid_half_width;
  grid.reserve(static_cast<std::size_t>(N) * N);
  for (int a = 0; a < N; ++a) {
    const double v_e = -w + 2.0 * w * a / (N - 1);
    for (int b = 0; b < N; ++b) {
      const double v_i = -w + 2.0 * w * b / (N - 1);
      grid.push_back({norm2(balance_F(MacroState{v_e, v_i, k_e, k_i}, p)), v_e, v_i});
    }
  }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const Candidate& x, const Candidate& y) { return x.norm < y.norm; });

  const auto starts = std::min<std::size_t>(grid.size(), std::max(options.max_starts, 1));
  for (std::size_t s = 0; s < starts; ++s) {
    if (auto root = attempt(grid[s].v_e, grid[s].v_i)) return *root;
  }
  if (all_singular) {
    throw SingularJacobianError(
        fmt::format("solve_balance: J_v singular at every start (det = {:.3e})", last_det),
        last_det);
  }
  throw NoRootError(
      fmt::format("solve_balance: no root for k = ({}, {}); best residual {:.3e}", k_e, k_i,
                  best_residual),
      best_residual);
}

std::array<std::complex<double>, 2> eigenvalues(const Jacobian2x2& J) {
  const double half_tr = 0.5 * J.trace();
  const double det = J.det();
  const double disc = half_tr * half_tr - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Larger-magnitude root first, the other from det to avoid cancellation.
    const double big = half_tr >= 0.0 ? half_tr + root : half_tr - root;
    const double small = big != 0.0 ? det / big : 0.0;
    std::array<std::complex<double>, 2> eig{std::complex<double>(big),
                                             std::complex<double>(small)};
    if (eig[0].real() < eig[1].real()) std::swap(eig[0], eig[1]);
    return eig;
  }
  const double imag = std::sqrt(-disc);
  return {std::complex<double>(half_tr, imag), std::complex<double>(half_tr, -imag)};
}

ManifoldReport classify(const MacroState& m, const NetworkParams& p, double residual_tol) {
  ManifoldReport r;
  r.state = m;
  r.residual = balance_F(m, p);
  const Jacobian2x2 J = jacobian_v(m, p);
  r.eig = eigenvalues(J);
  r.det_Jv = J.det();
  r.zeta = -std::max(r.eig[0].real(), r.eig[1].real());
  r.in_U = max_abs(r.residual) <= residual_tol && r.zeta > 0.0;
  return r;
}

}  // namespace bnet
