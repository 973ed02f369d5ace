#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>

#include "bnet/model.hpp"
#include "bnet/quadrature.hpp"

namespace bnet {

class NoRootError : public std::runtime_error {
 public:
  NoRootError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class SingularJacobianError : public std::runtime_error {
 public:
  SingularJacobianError(const std::string& what, double det)
      : std::runtime_error(what), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

struct ManifoldReport {
  MacroState state;
  PopulationPair residual;  // (F_e, F_i)
  std::array<std::complex<double>, 2> eig{};
  double det_Jv = 0.0;
  double zeta = 0.0;  // -max Re(eig)
  bool in_U = false;
};

struct BalanceOptions {
  std::optional<std::pair<double, double>> guess;
  double tolerance = 1e-12;
  int max_iterations = 100;
  int max_halvings = 30;
  int grid_points = 41;
  double grid_half_width = 10.0;
  double singular_det = 1e-14;
  int max_starts = 12;  // grid candidates tried, best residual first
};

struct BalancePoint {
  double m_e = 0.0;
  double m_i = 0.0;
  PopulationPair residual;
  int iterations = 0;
};

/// Solves F_e = F_i = 0 for the means at fixed variances (k_e, k_i) by
/// damped Newton on J_v. Without a guess, Newton starts from the best points
/// of a grid scan over [-w, w]^2.
BalancePoint solve_balance(double k_e, double k_i, const NetworkParams& p,
                           const BalanceOptions& options = {});

/// Newton projection of the means onto {F = 0} at fixed variances, started
/// from (m.v_e, m.v_i). Returns nullopt when the tolerance is not reached.
std::optional<BalancePoint> project_balance(const MacroState& m, const NetworkParams& p,
                                            const BalanceOptions& options = {});

/// Eigenvalues of a real 2x2 matrix from its trace and determinant.
std::array<std::complex<double>, 2> eigenvalues(const Jacobian2x2& J);

ManifoldReport classify(const MacroState& m, const NetworkParams& p, double residual_tol = 1e-12);

}  // namespace bnet
