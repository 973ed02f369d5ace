// balanced-net: balance points, limit trajectories, finite-n simulations and
// compensated Poisson checks from the command line.
//
// Exit codes: 0 success, 1 I/O failure, 2 initial point off the balanced
// manifold, 64 usage or configuration error, 3 other runtime failure.

#include <fmt/format.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bnet/config.hpp"
#include "bnet/csv.hpp"
#include "bnet/empirics.hpp"
#include "bnet/experiment.hpp"
#include "bnet/fluctuations.hpp"
#include "bnet/limit_ode.hpp"
#include "bnet/manifold.hpp"
#include "bnet/micro_io.hpp"
#include "bnet/simulator.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitOffManifold = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by the network-level subcommands. Unset flags fall back to
// the config file, then to the sec6_ke1_ki1 preset.
struct Common {
  std::string config;
  std::string preset = "sec6_ke1_ki1";
  std::optional<double> k_e, k_i, T, h, dt, stride;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c, bool with_sim) {
  app->add_option("--config", c.config, "key = value parameter file")->check(CLI::ExistingFile);
  app->add_option("--preset", c.preset, "built-in experiment")
      ->check(CLI::IsMember(bnet::experiment_preset_names()));
  app->add_option("--k-e", c.k_e, "initial excitatory variance");
  app->add_option("--k-i", c.k_i, "initial inhibitory variance");
  app->add_option("-T,--horizon", c.T, "time horizon");
  app->add_option("-h,--step", c.h, "limit integrator step");
  if (with_sim) {
    app->add_option("-n,--neurons", c.n, "neurons per population");
    app->add_option("--dt", c.dt, "fixed-step size");
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--stride", c.stride, "recording interval");
  }
}

bnet::ExperimentSpec resolve(const Common& c) {
  bnet::ExperimentSpec spec = bnet::experiment_preset(c.preset);
  if (!c.config.empty()) {
    spec = bnet::experiment_from(bnet::ConfigDocument::load(c.config), spec);
  }
  if (c.k_e) spec.k_e = *c.k_e;
  if (c.k_i) spec.k_i = *c.k_i;
  if (c.T) spec.T = *c.T;
  if (c.h) spec.h = *c.h;
  if (c.n) spec.params.n = *c.n;
  if (c.dt) spec.sim.method = bnet::FixedStepMethod{*c.dt};
  if (c.seed) spec.sim.seed = *c.seed;
  if (c.stride) spec.sim.record_stride = *c.stride;
  spec.sim.T = spec.T;
  spec.params.validate();
  return spec;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    bnet::write_file(out, text);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("'{}' is not a comma-separated list of numbers", text));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

// --- manifold ---------------------------------------------------------------

int run_manifold(const Common& c, const std::string& format, const std::string& out) {
  const auto spec = resolve(c);
  const auto root = bnet::solve_balance(spec.k_e, spec.k_i, spec.params);
  const auto r = bnet::classify({root.m_e, root.m_i, spec.k_e, spec.k_i}, spec.params);
  std::string text;
  if (format == "record") {
    text += fmt::format("k_e = {}\nk_i = {}\n", bnet::format_double(spec.k_e),
                        bnet::format_double(spec.k_i));
    text += fmt::format("m_e = {}\nm_i = {}\n", bnet::format_double(root.m_e),
                        bnet::format_double(root.m_i));
    text += fmt::format("F_e = {}\nF_i = {}\n", bnet::format_double(r.residual.e),
                        bnet::format_double(r.residual.i));
    text += fmt::format("det_Jv = {}\nzeta = {}\n", bnet::format_double(r.det_Jv),
                        bnet::format_double(r.zeta));
    for (std::size_t k = 0; k < 2; ++k) {
      text += fmt::format("eig{} = {} {}\n", k + 1, bnet::format_double(r.eig[k].real()),
                          bnet::format_double(r.eig[k].imag()));
    }
    text += fmt::format("in_U = {}\n", r.in_U ? 1 : 0);
  } else {
    text += fmt::format("balance point at (k_e, k_i) = ({}, {})\n", spec.k_e, spec.k_i);
    text += fmt::format("  m_e = {:.12f}\n  m_i = {:.12f}\n", root.m_e, root.m_i);
    text += fmt::format("  |F| = ({:.2e}, {:.2e}) after {} Newton steps\n", std::abs(r.residual.e),
                        std::abs(r.residual.i), root.iterations);
    text += fmt::format("  eig(J_v) = {:.6g}{:+.6g}i, {:.6g}{:+.6g}i\n", r.eig[0].real(),
                        r.eig[0].imag(), r.eig[1].real(), r.eig[1].imag());
    text += fmt::format("  det J_v = {:.6g}, zeta = {:.6g}, balanced manifold: {}\n", r.det_Jv,
                        r.zeta, r.in_U ? "yes" : "no");
  }
  emit(out, text);
  return 0;
}

// --- limit ------------------------------------------------------------------

int run_limit(const Common& c, const std::string& out) {
  const auto spec = resolve(c);
  const auto root = bnet::solve_balance(spec.k_e, spec.k_i, spec.params);
  const bnet::MacroState start{root.m_e, root.m_i, spec.k_e, spec.k_i};
  const auto initial = bnet::classify(start, spec.params, 1e-10);
  if (!initial.in_U) {
    throw bnet::OffManifoldError("initial point is not on the balanced manifold", initial);
  }
  const auto traj = bnet::integrate(start, spec.params, spec.T, spec.h);
  bnet::CsvBuilder csv({"t", "v_e", "v_i", "K_e", "K_i", "zeta", "det_Jv"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& m = traj.path.states[k];
    csv.cell(traj.path.times[k]).cell(m.v_e).cell(m.v_i).cell(m.K_e).cell(m.K_i);
    csv.cell(traj.zetas[k]).cell(traj.det_Jvs[k]);
    csv.end_row();
  }
  emit(out, csv.str());
  if (traj.eta_hit) {
    std::cerr << fmt::format("limit trajectory stopped at t = {}: {}\n", *traj.eta_hit, traj.eta_reason);
  }
  return 0;
}

// --- simulate ---------------------------------------------------------------

int run_simulate(const Common& c, const std::string& method, const std::string& out,
                 const std::string& dump) {
  auto spec = resolve(c);
  if (method == "exact") spec.sim.method = bnet::ExactMethod{};
  const auto root = bnet::solve_balance(spec.k_e, spec.k_i, spec.params);
  const auto init =
      bnet::init_micro(root.m_e, root.m_i, spec.k_e, spec.k_i, spec.params, spec.sim.seed);
  const auto sim = bnet::simulate(init, spec.params, spec.sim);
  for (const auto& w : sim.warnings) std::cerr << "warning: " << w << '\n';
  bnet::CsvBuilder csv({"t", "v_e", "v_i", "K_e", "K_i"});
  for (std::size_t k = 0; k < sim.trajectory.size(); ++k) {
    const auto& m = sim.trajectory.states[k];
    csv.cell(sim.trajectory.times[k]).cell(m.v_e).cell(m.v_i).cell(m.K_e).cell(m.K_i);
    csv.end_row();
  }
  emit(out, csv.str());
  if (!dump.empty()) bnet::write_micro(dump, sim.final_state);
  return 0;
}

// --- compare ----------------------------------------------------------------

int run_compare(const Common& c, const std::string& method, const std::string& out_dir) {
  auto spec = resolve(c);
  if (method == "exact") spec.sim.method = bnet::ExactMethod{};
  spec.out_dir = out_dir;
  const auto report = bnet::run_compare(spec);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << fmt::format("{} n = {} seed = {} T = {}\n", spec.name, spec.params.n, spec.sim.seed,
                           spec.T);
  std::cout << fmt::format("sup|v_e| = {:.6f}\nsup|v_i| = {:.6f}\nsup|K_e| = {:.6f}\nsup|K_i| = {:.6f}\n",
                           report.errors.v_e, report.errors.v_i, report.errors.K_e,
                           report.errors.K_i);
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
  return 0;
}

// --- convergence ------------------------------------------------------------

int run_convergence(const Common& c, const std::string& ns_text, std::size_t seeds,
                    std::uint64_t first_seed, const std::string& out) {
  const auto spec = resolve(c);
  std::vector<std::size_t> ns;
  for (const double v : parse_list(ns_text)) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw UsageError(fmt::format("--ns entries must be positive integers, got {}", v));
    }
    ns.push_back(static_cast<std::size_t>(v));
  }
  std::vector<std::uint64_t> seed_list;
  for (std::size_t s = 0; s < seeds; ++s) seed_list.push_back(first_seed + s);

  bnet::StudySetup setup;
  setup.k_e = spec.k_e;
  setup.k_i = spec.k_i;
  setup.T = spec.T;
  setup.h = spec.h;
  if (const auto* fixed = std::get_if<bnet::FixedStepMethod>(&spec.sim.method)) setup.dt = fixed->dt;
  setup.record_stride = spec.sim.record_stride;
  const auto study = bnet::convergence_study(ns, seed_list, spec.params, setup);

  bnet::CsvBuilder csv({"n", "seed", "sup_err_v_e", "sup_err_v_i", "sup_err_K_e", "sup_err_K_i",
                        "sup_err_total", "w1_e_final", "w1_i_final", "error"});
  for (const auto& r : study.rows) {
    csv.cell(std::uint64_t{r.n}).cell(r.seed).cell(r.sup_err_v_e).cell(r.sup_err_v_i);
    csv.cell(r.sup_err_K_e).cell(r.sup_err_K_i).cell(r.sup_err_total).cell(r.w1_e_final);
    csv.cell(r.w1_i_final).cell(r.error);
    csv.end_row();
  }
  emit(out, csv.str());
  for (const auto& m : study.medians) {
    std::cerr << fmt::format("n = {:>6}  median sup|v_e| = {:.4f}  median sup-total = {:.4f}  ({} rows)\n",
                             m.n, m.v_e, m.total, m.rows);
  }
  std::cerr << fmt::format("non-increasing: v_e {}, total {}; first/last ratio: v_e {:.3f}, total {:.3f}\n",
                           study.v_e_monotone ? "yes" : "no", study.total_monotone ? "yes" : "no",
                           study.v_e_ratio, study.total_ratio);
  return 0;
}

// --- fluct ------------------------------------------------------------------

int run_tail(std::size_t n, double T, const std::string& xs, std::size_t trials, std::uint64_t seed,
             const std::string& out) {
  const auto r = bnet::check_tail_bound(n, T, parse_list(xs), trials, seed);
  bnet::CsvBuilder csv({"x", "empirical_tail", "bound", "slack", "trials"});
  for (std::size_t k = 0; k < r.x_grid.size(); ++k) {
    csv.cell(r.x_grid[k]).cell(r.empirical_tail[k]).cell(r.bound[k]).cell(r.slack[k]);
    csv.cell(std::uint64_t{r.trials});
    csv.end_row();
  }
  emit(out, csv.str());
  std::cerr << (r.holds() ? "tail bound holds at every x\n" : "tail bound VIOLATED\n");
  return 0;
}

int run_moc(std::size_t n_procs, const std::string& eps, double delta, std::size_t trials,
            std::uint64_t seed, double horizon, const std::string& out) {
  const auto r = bnet::check_moc_concentration(n_procs, parse_list(eps), delta, trials, seed, horizon);
  bnet::CsvBuilder csv({"eps", "frequency", "mean_phi", "delta", "n_procs", "trials"});
  for (std::size_t k = 0; k < r.eps_grid.size(); ++k) {
    csv.cell(r.eps_grid[k]).cell(r.frequency[k]).cell(r.mean_phi[k]).cell(r.delta);
    csv.cell(std::uint64_t{r.n_procs}).cell(std::uint64_t{r.trials});
    csv.end_row();
  }
  emit(out, csv.str());
  std::cerr << fmt::format("non-increasing as eps decreases: {}; zero at smallest eps: {}\n",
                           r.non_increasing ? "yes" : "no", r.vanishes ? "yes" : "no");
  return 0;
}

int run_expsq(std::size_t n, double b, const std::string& Ts, std::size_t trials, std::uint64_t seed,
              const std::string& out) {
  const auto r = bnet::check_expectation_square(n, b, parse_list(Ts), trials, seed);
  bnet::CsvBuilder csv({"T", "mean", "std_error", "b", "trials"});
  for (std::size_t k = 0; k < r.horizons.size(); ++k) {
    csv.cell(r.horizons[k]).cell(r.mean[k]).cell(r.std_error[k]).cell(r.b);
    csv.cell(std::uint64_t{r.trials});
    csv.end_row();
  }
  emit(out, csv.str());
  std::cerr << fmt::format("monotone in T: {}\n", r.monotone ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced excitatory/inhibitory network: limits, simulation and diagnostics"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  std::function<int()> action;

  Common manifold_opts;
  std::string manifold_format = "text";
  std::string manifold_out;
  auto* manifold = app.add_subcommand("manifold", "balance point and stability at (k_e, k_i)");
  manifold->set_help_flag("--help");
  add_common(manifold, manifold_opts, false);
  manifold->add_option("--format", manifold_format)->check(CLI::IsMember({"text", "record"}));
  manifold->add_option("--out", manifold_out);
  manifold->callback([&] { action = [&] { return run_manifold(manifold_opts, manifold_format, manifold_out); }; });

  Common limit_opts;
  std::string limit_out;
  auto* limit = app.add_subcommand("limit", "integrate the limit system on the balanced manifold");
  limit->set_help_flag("--help");
  add_common(limit, limit_opts, false);
  limit->add_option("--out", limit_out, "CSV path (stdout when omitted)");
  limit->callback([&] { action = [&] { return run_limit(limit_opts, limit_out); }; });

  Common sim_opts;
  std::string sim_method = "fixed";
  std::string sim_out;
  std::string sim_dump;
  auto* simulate = app.add_subcommand("simulate", "finite-n network from the balance point");
  simulate->set_help_flag("--help");
  add_common(simulate, sim_opts, true);
  simulate->add_option("--method", sim_method)->check(CLI::IsMember({"exact", "fixed"}));
  simulate->add_option("--out", sim_out, "CSV path (stdout when omitted)");
  simulate->add_option("--dump-micro", sim_dump, "binary dump of the final potentials");
  simulate->callback([&] { action = [&] { return run_simulate(sim_opts, sim_method, sim_out, sim_dump); }; });

  Common cmp_opts;
  std::string cmp_method = "fixed";
  std::string cmp_dir = "compare_out";
  auto* compare = app.add_subcommand("compare", "empirical vs limit trajectories, CSV and SVG panels");
  compare->set_help_flag("--help");
  add_common(compare, cmp_opts, true);
  compare->add_option("--method", cmp_method)->check(CLI::IsMember({"exact", "fixed"}));
  compare->add_option("--out-dir", cmp_dir, "output directory");
  compare->callback([&] { action = [&] { return run_compare(cmp_opts, cmp_method, cmp_dir); }; });

  Common conv_opts;
  conv_opts.T = 5.0;
  std::string conv_ns = "250,1000,4000";
  std::size_t conv_seeds = 10;
  std::uint64_t conv_first = 1;
  std::string conv_out;
  auto* convergence = app.add_subcommand("convergence", "sup-errors across n and seeds");
  convergence->set_help_flag("--help");
  add_common(convergence, conv_opts, true);
  convergence->add_option("--ns", conv_ns, "comma-separated population sizes");
  convergence->add_option("--seeds", conv_seeds, "seeds per n")->check(CLI::PositiveNumber);
  convergence->add_option("--first-seed", conv_first, "seeds are first-seed, first-seed + 1, ...");
  convergence->add_option("--out", conv_out, "CSV path (stdout when omitted)");
  convergence->callback([&] {
    action = [&] { return run_convergence(conv_opts, conv_ns, conv_seeds, conv_first, conv_out); };
  });

  auto* fluct = app.add_subcommand("fluct", "compensated Poisson checks");
  fluct->set_help_flag("--help");
  fluct->require_subcommand(1);

  std::size_t tail_n = 100;
  double tail_T = 1.0;
  std::string tail_xs = "0.5,1,2,3";
  std::size_t tail_trials = 10000;
  std::uint64_t tail_seed = 42;
  std::string tail_out;
  auto* tail = fluct->add_subcommand("tail", "P(sup|w| >= x sqrt(n)) against 2 exp(-x^2 / 4T)");
  tail->set_help_flag("--help");
  tail->add_option("-n,--n", tail_n)->check(CLI::PositiveNumber);
  tail->add_option("-T,--horizon", tail_T)->check(CLI::PositiveNumber);
  tail->add_option("--xs", tail_xs);
  tail->add_option("--trials", tail_trials)->check(CLI::PositiveNumber);
  tail->add_option("--seed", tail_seed);
  tail->add_option("--out", tail_out);
  tail->callback([&] {
    action = [&] { return run_tail(tail_n, tail_T, tail_xs, tail_trials, tail_seed, tail_out); };
  });

  std::size_t moc_n = 100;
  std::string moc_eps = "0.1,0.01,0.001";
  double moc_delta = 0.5;
  std::size_t moc_trials = 1000;
  std::uint64_t moc_seed = 42;
  double moc_horizon = 1.0;
  std::string moc_out;
  auto* moc = fluct->add_subcommand("moc", "modulus-of-continuity concentration");
  moc->set_help_flag("--help");
  moc->add_option("-n,--n-procs", moc_n)->check(CLI::PositiveNumber);
  moc->add_option("--eps", moc_eps);
  moc->add_option("--delta", moc_delta);
  moc->add_option("--trials", moc_trials)->check(CLI::PositiveNumber);
  moc->add_option("--seed", moc_seed);
  moc->add_option("-T,--horizon", moc_horizon)->check(CLI::PositiveNumber);
  moc->add_option("--out", moc_out);
  moc->callback([&] {
    action = [&] {
      return run_moc(moc_n, moc_eps, moc_delta, moc_trials, moc_seed, moc_horizon, moc_out);
    };
  });

  std::size_t sq_n = 100;
  double sq_b = 0.1;
  std::string sq_Ts = "1,0.1,0.01";
  std::size_t sq_trials = 10000;
  std::uint64_t sq_seed = 42;
  std::string sq_out;
  auto* expsq = fluct->add_subcommand("expsq", "E[exp(b sup|w|^2 / n)] across horizons");
  expsq->set_help_flag("--help");
  expsq->add_option("-n,--n", sq_n)->check(CLI::PositiveNumber);
  expsq->add_option("-b", sq_b);
  expsq->add_option("--Ts", sq_Ts);
  expsq->add_option("--trials", sq_trials)->check(CLI::Range(2, 1 << 30));
  expsq->add_option("--seed", sq_seed);
  expsq->add_option("--out", sq_out);
  expsq->callback([&] {
    action = [&] { return run_expsq(sq_n, sq_b, sq_Ts, sq_trials, sq_seed, sq_out); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return action();
  } catch (const bnet::OffManifoldError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOffManifold;
  } catch (const bnet::NoRootError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOffManifold;
  } catch (const bnet::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const bnet::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
