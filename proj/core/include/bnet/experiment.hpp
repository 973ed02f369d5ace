#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnet/config.hpp"
#include "bnet/empirics.hpp"
#include "bnet/limit_ode.hpp"
#include "bnet/manifold.hpp"
#include "bnet/simulator.hpp"

namespace bnet {

class OffManifoldError : public std::runtime_error {
 public:
  OffManifoldError(const std::string& what, const ManifoldReport& report)
      : std::runtime_error(what), report_(report) {}
  const ManifoldReport& report() const { return report_; }

 private:
  ManifoldReport report_;
};

struct ExperimentSpec {
  std::string name;
  NetworkParams params;
  double k_e = 1.0;
  double k_i = 1.0;
  double T = 10.0;
  double h = 1e-3;  // limit step
  SimConfig sim;    // sim.T is overwritten with T
  /// Initial means; solved from F = 0 when absent.
  std::optional<std::pair<double, double>> means;
  /// Refuse initial data outside the balanced manifold.
  bool require_manifold = true;
  /// Directory for compare.csv and the four panels; nothing is written when empty.
  std::filesystem::path out_dir;
};

/// "sec6_ke1_ki1" (k_e = k_i = 1) and "sec6_ke1_ki05" (k_e = 1, k_i = 1/2):
/// reference network, n = 5000, T = 10, h = dt = 1e-3, stride 0.01, seed 42.
ExperimentSpec experiment_preset(std::string_view name);
std::vector<std::string> experiment_preset_names();

/// Network keys as in network_params_from plus optional k_e, k_i, T, h, dt,
/// seed and stride, applied on top of `base`. Network keys missing from the
/// document keep their values from base.params.
ExperimentSpec experiment_from(const ConfigDocument& doc, ExperimentSpec base);

struct CompareReport {
  BalancePoint start;
  ManifoldReport initial;
  LimitTrajectory limit;
  Trajectory empirical;  // clipped to the limit grid
  SupErrors errors;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Balance point, micro initialisation, simulation and limit integration on a
/// common grid. Throws OffManifoldError when the initial point is not in the
/// balanced manifold (unless require_manifold is false).
CompareReport run_compare(const ExperimentSpec& spec);

}  // namespace bnet
