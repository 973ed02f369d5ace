#include "bnet/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

#include "bnet/csv.hpp"
#include "bnet/svg.hpp"

namespace bnet {

namespace {

constexpr double kInitialResidualTol = 1e-10;

ExperimentSpec reference_experiment(std::string name, double k_i) {
  ExperimentSpec spec;
  spec.name = std::move(name);
  spec.params = reference_params();
  spec.k_e = 1.0;
  spec.k_i = k_i;
  spec.T = 10.0;
  spec.h = 1e-3;
  spec.sim.method = FixedStepMethod{1e-3};
  spec.sim.seed = 42;
  spec.sim.record_stride = 0.01;
  return spec;
}

void write_outputs(const ExperimentSpec& spec, CompareReport& report) {
  std::filesystem::create_directories(spec.out_dir);
  const Trajectory& emp = report.empirical;

  CsvBuilder csv({"t", "v_hat_e", "v_bar_e", "v_hat_i", "v_bar_i", "K_hat_e", "K_e", "K_hat_i",
                  "K_i"});
  std::vector<MacroState> lim;
  lim.reserve(emp.size());
  for (std::size_t k = 0; k < emp.size(); ++k) {
    const MacroState& x = emp.states[k];
    const MacroState y = interpolate(report.limit.path, emp.times[k]);
    lim.push_back(y);
    csv.cell(emp.times[k]).cell(x.v_e).cell(y.v_e).cell(x.v_i).cell(y.v_i);
    csv.cell(x.K_e).cell(y.K_e).cell(x.K_i).cell(y.K_i);
    csv.end_row();
  }
  const auto csv_path = spec.out_dir / "compare.csv";
  write_file(csv_path, csv.str());
  report.files.push_back(csv_path);

  struct Panel {
    const char* file;
    const char* symbol;
    double (*get)(const MacroState&);
  };
  const Panel panels[] = {
      {"K_i.svg", "K_i", [](const MacroState& m) { return m.K_i; }},
      {"K_e.svg", "K_e", [](const MacroState& m) { return m.K_e; }},
      {"v_i.svg", "v_i", [](const MacroState& m) { return m.v_i; }},
      {"v_e.svg", "v_e", [](const MacroState& m) { return m.v_e; }},
  };
  for (const Panel& panel : panels) {
    Series empirical{fmt::format("{} empirical (n = {})", panel.symbol, spec.params.n), emp.times,
                     {}};
    Series limit{fmt::format("{} limit", panel.symbol), emp.times, {}};
    for (std::size_t k = 0; k < emp.size(); ++k) {
      empirical.values.push_back(panel.get(emp.states[k]));
      limit.values.push_back(panel.get(lim[k]));
    }
    PlotLabels labels;
    labels.title = fmt::format("{}: {} (k_e = {}, k_i = {})", spec.name, panel.symbol, spec.k_e,
                               spec.k_i);
    labels.y_axis = panel.symbol;
    const auto path = spec.out_dir / panel.file;
    emit_svg({empirical, limit}, path, labels);
    report.files.push_back(path);
  }
}

}  // namespace

std::vector<std::string> experiment_preset_names() { return {"sec6_ke1_ki1", "sec6_ke1_ki05"}; }

ExperimentSpec experiment_preset(std::string_view name) {
  if (name == "sec6_ke1_ki1") return reference_experiment(std::string(name), 1.0);
  if (name == "sec6_ke1_ki05") return reference_experiment(std::string(name), 0.5);
  throw std::invalid_argument(fmt::format("unknown experiment preset '{}'", name));
}

ExperimentSpec experiment_from(const ConfigDocument& doc, ExperimentSpec base) {
  ConfigDocument merged;
  try {
    std::stringstream current;
    write_network_params(current, base.params);
    merged = ConfigDocument::parse(current);
  } catch (const ConfigError&) {
    // custom rates have no text form; the document must then be complete
  }
  for (const auto& [key, value] : doc.entries()) merged.set(key, value);
  base.params = network_params_from(merged);
  if (auto v = doc.find_double("k_e")) base.k_e = *v;
  if (auto v = doc.find_double("k_i")) base.k_i = *v;
  if (auto v = doc.find_double("T")) base.T = *v;
  if (auto v = doc.find_double("h")) base.h = *v;
  if (auto v = doc.find_double("dt")) {
    if (auto* fixed = std::get_if<FixedStepMethod>(&base.sim.method)) fixed->dt = *v;
  }
  if (auto v = doc.find_unsigned("seed")) base.sim.seed = *v;
  if (auto v = doc.find_double("stride")) base.sim.record_stride = *v;
  return base;
}

CompareReport run_compare(const ExperimentSpec& spec) {
  spec.params.validate();
  CompareReport report;
  if (spec.means) {
    report.start.m_e = spec.means->first;
    report.start.m_i = spec.means->second;
    report.start.residual = balance_F(MacroState{spec.means->first, spec.means->second, spec.k_e,
                                                 spec.k_i},
                                      spec.params);
  } else {
    try {
      report.start = solve_balance(spec.k_e, spec.k_i, spec.params);
    } catch (const NoRootError& e) {
      if (spec.require_manifold) {
        ManifoldReport none;
        none.state = MacroState{0.0, 0.0, spec.k_e, spec.k_i};
        throw OffManifoldError(fmt::format("no balanced point for k = ({}, {}): {}", spec.k_e,
                                           spec.k_i, e.what()),
                               none);
      }
      throw;
    }
  }
  const MacroState start{report.start.m_e, report.start.m_i, spec.k_e, spec.k_i};
  report.initial = classify(start, spec.params, kInitialResidualTol);
  if (spec.require_manifold && !report.initial.in_U) {
    throw OffManifoldError(
        fmt::format("initial point (v_e, v_i, K_e, K_i) = ({}, {}, {}, {}) is not on the balanced "
                    "manifold (|F| = ({:.3e}, {:.3e}), zeta = {:.4g})",
                    start.v_e, start.v_i, start.K_e, start.K_i, report.initial.residual.e,
                    report.initial.residual.i, report.initial.zeta),
        report.initial);
  }

  IntegrateOptions opt;
  opt.stop_on_exit = spec.require_manifold;
  report.limit = integrate(start, spec.params, spec.T, spec.h, opt);
  if (report.limit.eta_hit) {
    report.warnings.push_back(fmt::format("limit trajectory stopped at t = {}: {}",
                                          *report.limit.eta_hit, report.limit.eta_reason));
  }

  SimConfig cfg = spec.sim;
  cfg.T = spec.T;
  const MicroState init = init_micro(start.v_e, start.v_i, spec.k_e, spec.k_i, spec.params, cfg.seed);
  SimResult sim = simulate(init, spec.params, cfg);
  for (auto& w : sim.warnings) report.warnings.push_back(std::move(w));

  const double t_end = report.limit.path.times.back();
  for (std::size_t k = 0; k < sim.trajectory.size(); ++k) {
    if (sim.trajectory.times[k] > t_end * (1.0 + 1e-12)) break;
    report.empirical.push(sim.trajectory.times[k], sim.trajectory.states[k]);
  }
  report.errors = sup_error(report.empirical, report.limit);

  if (!spec.out_dir.empty()) write_outputs(spec, report);
  return report;
}

}  // namespace bnet
