#include "levisqueeze/commands.hpp"

#include "levisqueeze/errors.hpp"
#include "levisqueeze/figures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace levisqueeze {

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LinearGaussianModel model_of(const RunConfig& cfg) { return build_model(cfg.model, cfg.params, cfg.variant); }

double step_of(const RunConfig& cfg, const LinearGaussianModel& model) {
  return cfg.evaluation.dt > 0.0 ? cfg.evaluation.dt : default_time_step(model);
}

nlohmann::json stats_json(const IntegratorStats& s) {
  return {{"steps", s.steps}, {"dt", s.dt}, {"max_halving_error", s.max_halving_error},
          {"monitored_steps", s.monitored_steps}, {"storage_stride", s.storage_stride}};
}

nlohmann::json report_json(const SqueezingReport& r) {
  nlohmann::json j{{"v_sq", r.v_sq}, {"v_asq", r.v_asq}, {"eta", r.eta}, {"angle", r.angle},
                   {"nonclassical", r.nonclassical}};
  if (r.time) j["time"] = *r.time;
  return j;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

CommandResult cmd_evolve(const RunConfig& cfg) {
  const LinearGaussianModel model = model_of(cfg);
  const double dt = step_of(cfg, model);
  const EvolutionResult run =
      evolve(model, initial_covariance(model.basis(), cfg.params.nbar0), cfg.evaluation.t_end, dt);
  CommandResult out;
  out.doc.table = evolution_table(run, is_lab_frame(cfg.model), cfg.params.omega_x);
  out.doc.summary = {{"integrator", stats_json(run.stats)}};
  out.provenance = {{"integrator", stats_json(run.stats)}};
  return out;
}

CommandResult cmd_steady(const RunConfig& cfg) {
  const LinearGaussianModel model = model_of(cfg);
  const SteadyStateResult ss = steady_state(model);
  const SqueezingReport r = squeezing_metrics(mechanical_block(ss.covariance));
  const CovarianceMatrix m = mechanical_block(ss.covariance);
  CommandResult out;
  out.doc.table = Table({"v_sq", "v_asq", "eta", "angle", "Vxx", "Vxp", "Vpp", "residual_norm"});
  out.doc.table.add_row({r.v_sq, r.v_asq, r.eta, r.angle, m(0, 0), m(0, 1), m(1, 1), ss.residual_norm});
  out.doc.summary = report_json(r);
  out.doc.summary["basis"] = model.basis().labels();
  out.doc.summary["covariance"] = matrix_json(ss.covariance.entries());
  out.doc.summary["residual_norm"] = ss.residual_norm;
  out.doc.summary["max_real_part"] = ss.stability.max_real_part;
  return out;
}

CommandResult cmd_stability(const RunConfig& cfg) {
  const LinearGaussianModel model = model_of(cfg);
  if (!model.is_time_independent()) {
    throw ValidationError("stability: model '" + std::string(to_string(cfg.model)) +
                          "' has a time-dependent drift; use a rotating-frame model");
  }
  const StabilityReport s = stability(model);
  CommandResult out;
  out.doc.table = Table({"re", "im"});
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& e : s.eigenvalues) {
    out.doc.table.add_row({e.real(), e.imag()});
    eig.push_back({e.real(), e.imag()});
  }
  out.doc.summary = {{"stable", s.stable}, {"max_real_part", s.max_real_part}, {"eigenvalues", eig}};
  return out;
}

CommandResult cmd_threshold(const RunConfig& cfg) {
  const ThresholdSpec& spec = cfg.threshold;
  const ModelFamily family = [&](double v) {
    SystemParams p = cfg.params;
    p.set(spec.axis, v);
    return build_model(cfg.model, p, cfg.variant);
  };
  const ThresholdResult th = find_threshold(family, spec.lo, spec.hi, spec.tol);
  CommandResult out;
  out.doc.table = Table({"axis", "value", "lo", "hi", "iterations"});
  out.doc.table.add_row({spec.axis, th.value, th.lo, th.hi, static_cast<double>(th.iterations)});
  out.doc.summary = {{"axis", spec.axis}, {"value", th.value}, {"lo", th.lo}, {"hi", th.hi},
                     {"iterations", th.iterations}, {"tolerance", spec.tol}};
  if (spec.axis == "lambda" && cfg.model == ModelKind::kEliminatedDetuned) {
    out.doc.summary["closed_form"] = threshold_coupling(cfg.params);
  }
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const ModelFactory factory = [&](const SystemParams& p) { return build_model(cfg.model, p, cfg.variant); };
  const std::vector<SweepRow> rows = sweep(cfg.sweep, cfg.params, factory, cfg.evaluation);
  std::vector<std::string> cols{"value", "v_sq", "v_asq", "eta", "angle", "t_opt", "status"};
  const auto& fields = SystemParams::field_names();
  cols.insert(cols.end(), fields.begin(), fields.end());
  CommandResult out;
  out.doc.table = Table(cols);
  size_t ok = 0;
  for (const SweepRow& r : rows) {
    std::vector<Cell> row{r.value};
    if (r.report) {
      ++ok;
      row.insert(row.end(), {r.report->v_sq, r.report->v_asq, r.report->eta, r.report->angle,
                             r.report->time ? *r.report->time : kNaN});
    } else {
      row.insert(row.end(), {kNaN, kNaN, kNaN, kNaN, kNaN});
    }
    row.push_back(r.status);
    for (const auto& [name, value] : r.params.snapshot()) row.push_back(value);
    out.doc.table.add_row(std::move(row));
  }
  out.doc.summary = {{"axis", cfg.sweep.name}, {"points", rows.size()}, {"ok", ok}};
  out.provenance = {{"grid", {{"axis", cfg.sweep.name}, {"start", cfg.sweep.start}, {"stop", cfg.sweep.stop},
                              {"points", cfg.sweep.points},
                              {"scale", cfg.sweep.scale == AxisScale::kLog ? "log" : "linear"}}}};
  return out;
}

CommandResult cmd_figure(const RunConfig& cfg) {
  if (cfg.figure.empty()) {
    throw ValidationError("figure: no figure id (set 'figure' or pass --figure)");
  }
  FigureResult fig = run_figure(cfg.figure, cfg);
  CommandResult out;
  out.doc = std::move(fig.doc);
  out.provenance = std::move(fig.procedure);
  return out;
}

Matrix lyapunov_at(const EvolutionResult& run, double t) {
  const auto it = std::lower_bound(run.times.begin(), run.times.end(), t);
  if (it == run.times.end()) return run.covariances.back().entries();
  const size_t hi = static_cast<size_t>(it - run.times.begin());
  if (hi == 0 || *it == t) return run.covariances[hi].entries();
  const double w = (t - run.times[hi - 1]) / (run.times[hi] - run.times[hi - 1]);
  return (1.0 - w) * run.covariances[hi - 1].entries() + w * run.covariances[hi].entries();
}

CommandResult cmd_mc_validate(const RunConfig& cfg) {
  const LinearGaussianModel model = model_of(cfg);
  const CovarianceMatrix v0 = initial_covariance(model.basis(), cfg.params.nbar0);
  const EnsembleResult ensemble = simulate_ensemble(model, v0, cfg.ensemble);
  const double dt = step_of(cfg, model);
  const EvolutionResult lyapunov = evolve(model, v0, cfg.ensemble.t_end, dt);
  const ComparisonReport report = compare(ensemble, lyapunov);

  CommandResult out;
  out.doc.table = Table({"t", "row", "col", "ensemble", "lyapunov", "standard_error", "z"});
  const auto& labels = model.basis().labels();
  for (size_t c = 0; c < ensemble.times.size(); ++c) {
    const double t = ensemble.times[c];
    const Matrix ref = lyapunov_at(lyapunov, t);
    size_t z = 0;
    for (int i = 0; i < model.basis().dim(); ++i) {
      for (int j = i; j < model.basis().dim(); ++j) {
        out.doc.table.add_row({t, labels[static_cast<size_t>(i)], labels[static_cast<size_t>(j)],
                               ensemble.covariances[c](i, j), ref(i, j),
                               ensemble.standard_errors[c](i, j), report.z_scores[c][z]});
        ++z;
      }
    }
  }
  out.doc.summary = {{"max_abs_z", report.max_abs_z}, {"z_limit", kZScoreLimit}, {"pass", report.pass},
                     {"worst_time", report.worst_time},
                     {"worst_entry", labels[static_cast<size_t>(report.worst_row)] + "," +
                                         labels[static_cast<size_t>(report.worst_col)]},
                     {"n_traj", ensemble.n_traj}};
  out.provenance = {{"ensemble", {{"n_traj", cfg.ensemble.n_traj}, {"dt", cfg.ensemble.dt},
                                  {"t_end", cfg.ensemble.t_end}, {"seed", cfg.ensemble.seed},
                                  {"checkpoints", cfg.ensemble.checkpoints},
                                  {"block_size", cfg.ensemble.block_size}}},
                    {"lyapunov", stats_json(lyapunov.stats)}};
  out.passed = report.pass;
  if (!report.pass) {
    out.failure = "mc-validate: max |z| = " + format_double(report.max_abs_z) + " >= " +
                  format_double(kZScoreLimit);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"evolve", "steady", "stability", "threshold",
                                              "sweep",  "figure", "mc-validate"};
  return names;
}

OutputFormat default_format(const std::string& command) {
  if (command == "evolve" || command == "sweep" || command == "figure") return OutputFormat::kCsv;
  return OutputFormat::kJson;
}

CommandResult execute(const std::string& command, const RunConfig& config) {
  if (command == "evolve") return cmd_evolve(config);
  if (command == "steady") return cmd_steady(config);
  if (command == "stability") return cmd_stability(config);
  if (command == "threshold") return cmd_threshold(config);
  if (command == "sweep") return cmd_sweep(config);
  if (command == "figure") return cmd_figure(config);
  if (command == "mc-validate") return cmd_mc_validate(config);
  throw ValidationError("unknown command '" + command + "'");
}

nlohmann::json make_sidecar(const std::string& command, const RunConfig& config, const CommandResult& result) {
  nlohmann::json side = config.document;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : config.params.snapshot()) params[k] = v;
  side["_provenance"] = {{"tool", "levisqueeze"},
                         {"version", kToolVersion},
                         {"command", command},
                         {"model", to_string(config.model)},
                         {"variant", to_string(config.variant)},
                         {"params", params},
                         {"t_end", config.evaluation.t_end},
                         {"dt", config.evaluation.dt},
                         {"details", result.provenance}};
  return side;
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(command_names().begin(), command_names().end(), inv.command) == command_names().end()) {
      throw ValidationError("unknown command '" + inv.command + "'");
    }
    std::vector<std::string> overrides = inv.overrides;
    if (inv.format) overrides.push_back("format=" + *inv.format);
    if (inv.figure) overrides.push_back("figure=" + *inv.figure);
    const RunConfig config = load_config(inv.config_path, overrides);
    const OutputFormat format = config.format.value_or(default_format(inv.command));

    const CommandResult result = execute(inv.command, config);
    if (inv.out_path) {
      RunConfig recorded = config;
      recorded.document["format"] = std::string(to_string(format));
      write_outputs(*inv.out_path, result.doc, format, make_sidecar(inv.command, recorded, result));
    } else {
      write_document(out, result.doc, format);
    }
    if (!result.passed) {
      err << "levisqueeze: " << result.failure << '\n';
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "levisqueeze: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "levisqueeze: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "levisqueeze: error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace levisqueeze
