#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "bnet/csv.hpp"
#include "bnet/experiment.hpp"

using namespace bnet;

namespace {

ExperimentSpec uncoupled(std::size_t n) {
  ExperimentSpec spec;
  spec.name = "uncoupled";
  spec.params = reference_params();
  spec.params.n = n;
  spec.params.coupling = {0, 0, 0, 0};
  spec.k_e = 1.0;
  spec.k_i = 0.5;
  spec.T = 1.0;
  spec.means = std::make_pair(0.0, 0.0);
  spec.require_manifold = false;
  spec.sim.method = FixedStepMethod{1e-3};
  spec.sim.seed = 4;
  spec.sim.record_stride = 0.05;
  return spec;
}

}  // namespace

TEST(Experiment, PresetsAreKnown) {
  const auto names = experiment_preset_names();
  ASSERT_EQ(names.size(), 2u);
  const ExperimentSpec a = experiment_preset("sec6_ke1_ki1");
  const ExperimentSpec b = experiment_preset("sec6_ke1_ki05");
  EXPECT_EQ(a.k_i, 1.0);
  EXPECT_EQ(b.k_i, 0.5);
  EXPECT_EQ(a.params.n, 5000u);
  EXPECT_EQ(a.T, 10.0);
  EXPECT_EQ(a.sim.seed, 42u);
  EXPECT_THROW(experiment_preset("nope"), std::invalid_argument);
}

TEST(Experiment, ConfigOverridesPreset) {
  std::istringstream in("k_i = 0.25\nT = 2\nseed = 9\nn = 300\ndt = 0.002\n");
  const ConfigDocument doc = ConfigDocument::parse(in);
  const ExperimentSpec s = experiment_from(doc, experiment_preset("sec6_ke1_ki1"));
  EXPECT_EQ(s.k_i, 0.25);
  EXPECT_EQ(s.T, 2.0);
  EXPECT_EQ(s.sim.seed, 9u);
  EXPECT_EQ(s.params.n, 300u);
  EXPECT_EQ(std::get<FixedStepMethod>(s.sim.method).dt, 0.002);
  EXPECT_EQ(s.params.C(kEI), experiment_preset("sec6_ke1_ki1").params.C(kEI));
}

TEST(Experiment, UncoupledNetworkDecaysLikeLimit) {
  const CompareReport r = run_compare(uncoupled(4000));
  ASSERT_FALSE(r.limit.eta_hit.has_value()) << r.limit.eta_reason;
  ASSERT_EQ(r.empirical.size(), 21u);
  EXPECT_NEAR(r.limit.path.states.back().K_e, std::exp(-2.0), 1e-10);
  EXPECT_NEAR(r.limit.path.states.back().K_i, 0.5 * std::exp(-2.0), 1e-10);
  EXPECT_EQ(r.limit.path.states.back().v_e, 0.0);
  // sampling noise of the initial law only, about 4 standard errors
  EXPECT_LT(r.errors.v_e, 4 * std::sqrt(1.0 / 4000));
  EXPECT_LT(r.errors.K_e, 4 * std::sqrt(2.0 / 4000));
  EXPECT_LT(r.errors.K_i, 4 * 0.5 * std::sqrt(2.0 / 4000));
}

TEST(Experiment, WritesTableAndPanels) {
  ExperimentSpec spec = uncoupled(200);
  spec.out_dir = std::filesystem::temp_directory_path() / "bnet_experiment_test";
  std::filesystem::remove_all(spec.out_dir);
  const CompareReport r = run_compare(spec);
  ASSERT_EQ(r.files.size(), 5u);
  for (const char* f : {"compare.csv", "v_e.svg", "v_i.svg", "K_e.svg", "K_i.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(spec.out_dir / f)) << f;
  }
  const std::string csv = read_file(spec.out_dir / "compare.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,v_hat_e,v_bar_e,v_hat_i,v_bar_i,K_hat_e,K_e,K_hat_i,K_i");
}

TEST(Experiment, OffManifoldStartIsRejected) {
  ExperimentSpec spec = experiment_preset("sec6_ke1_ki1");
  spec.params.n = 50;
  spec.T = 0.1;
  spec.params.C(kIE) = 0.0;
  EXPECT_THROW(run_compare(spec), OffManifoldError);
}

TEST(Experiment, UncoupledStartIsOutsideBalancedSet) {
  ExperimentSpec spec = uncoupled(50);
  spec.require_manifold = true;
  EXPECT_THROW(run_compare(spec), OffManifoldError);
}
