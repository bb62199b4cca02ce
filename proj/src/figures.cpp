#include "levisqueeze/figures.hpp"

#include "levisqueeze/errors.hpp"
#include "levisqueeze/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace levisqueeze {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

std::vector<Cell> report_cells(const std::optional<SqueezingReport>& r) {
  if (!r) return {kNaN, kNaN, kNaN};
  return {r->v_sq, r->v_asq, r->eta};
}

template <class... Vs>
std::vector<Cell> concat(std::vector<Cell> a, const Vs&... rest) {
  (a.insert(a.end(), rest.begin(), rest.end()), ...);
  return a;
}

std::vector<double> linspace(double a, double b, int n, bool endpoint = true) {
  std::vector<double> out(static_cast<size_t>(n));
  const int div = endpoint ? n - 1 : n;
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = div > 0 ? a + (b - a) * i / div : a;
  if (endpoint && n > 1) out.back() = b;
  return out;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out = linspace(std::log10(a), std::log10(b), n);
  for (double& v : out) v = std::pow(10.0, v);
  return out;
}

std::vector<double> occupation_grid() {
  std::vector<double> grid{0.0};
  const auto tail = logspace(1e-2, 1e2, 25);
  grid.insert(grid.end(), tail.begin(), tail.end());
  return grid;
}

SystemParams with_overrides(SystemParams base, const RunConfig& config) {
  for (const auto& name : SystemParams::field_names()) {
    if (config.is_set(name)) base.set(name, config.params.get(name));
  }
  if (config.is_set("quality_factor")) base.set_quality_factor(config.params.quality_factor());
  base.validate();
  return base;
}

SystemParams dissipative_base(const RunConfig& config) {
  SystemParams p;
  p.delta = p.omega_x;
  if (config.is_set("omega_x") && !config.is_set("delta")) {
    p.omega_x = config.params.omega_x;
    p.delta = p.omega_x;
  }
  return with_overrides(p, config);
}

double steady_v_sq(const SystemParams& p) {
  try {
    const SteadyStateResult ss = steady_state(build_bogoliubov_dissipative(p));
    return squeezing_metrics(mechanical_block(ss.covariance)).v_sq;
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::optional<SqueezingReport> steady_report(const SystemParams& p, std::string& status) {
  try {
    const SteadyStateResult ss = steady_state(build_bogoliubov_dissipative(p));
    status = "ok";
    return squeezing_metrics(mechanical_block(ss.covariance));
  } catch (const NoSteadyStateError&) {
    status = "unstable";
  } catch (const std::exception& e) {
    status = e.what();
  }
  return std::nullopt;
}

nlohmann::json params_json(const SystemParams& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : p.snapshot()) j[k] = v;
  return j;
}

// Evolve-format trajectories of several runs stacked with leading label columns.
Table stacked_trajectories(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& keys,
                           const std::vector<EvolutionResult>& runs) {
  std::vector<std::string> cols = labels;
  const Table first = evolution_table(runs.front(), false, 1.0);
  const std::vector<std::string> mech(first.columns().begin(), first.columns().begin() + 7);
  cols.insert(cols.end(), mech.begin(), mech.end());
  Table t(cols);
  for (size_t r = 0; r < runs.size(); ++r) {
    const Table one = evolution_table(runs[r], false, 1.0);
    for (const auto& row : one.rows()) {
      std::vector<Cell> cells(keys[r].begin(), keys[r].end());
      cells.insert(cells.end(), row.begin(), row.begin() + 7);
      t.add_row(std::move(cells));
    }
  }
  return t;
}

FigureResult fig2a(const RunConfig& config) {
  const SystemParams p = with_overrides(SystemParams{}, config);
  const double t_end = 20.0;
  const LinearGaussianModel model = build_full_cs(p);
  const double dt = default_time_step(model);
  const EvolutionResult run = evolve(model, initial_covariance(model.basis(), p.nbar0), t_end, dt);
  FigureResult out;
  out.doc.table = evolution_table(run, false, p.omega_x);
  out.procedure = {{"model", "full"}, {"params", params_json(p)}, {"t_end", t_end}, {"dt", dt},
                   {"stored_samples", run.times.size()}};
  return out;
}

FigureResult fig2b(const RunConfig& config) {
  const SystemParams base = with_overrides(SystemParams{}, config);
  const double t_end = 100.0;
  const double lambda_th = threshold_coupling(base);
  const std::vector<double> lambdas{lambda_th, 1.58};
  const auto runs = parallel_map(lambdas.size(), [&](size_t i) {
    SystemParams p = base;
    p.lambda = lambdas[i];
    const LinearGaussianModel model = build_full_cs(p);
    return evolve(model, initial_covariance(model.basis(), p.nbar0), t_end, default_time_step(model));
  });
  FigureResult out;
  out.doc.table = stacked_trajectories({"lambda"}, {{lambdas[0]}, {lambdas[1]}}, runs);
  out.doc.summary = {{"lambda_th", lambda_th}};
  out.procedure = {{"model", "full"}, {"params", params_json(base)}, {"lambda", lambdas}, {"t_end", t_end},
                   {"dt", runs.front().stats.dt}};
  return out;
}

// Time-optimized v_sq over the initial-occupation grid for each series value.
Table occupation_scan(const std::string& series_name, const std::vector<double>& series, const SystemParams& base,
                      const ModelFactory& factory, const Evaluation& eval) {
  const std::vector<double> grid = occupation_grid();
  const size_t n = grid.size();
  const auto rows = parallel_map(series.size() * n, [&](size_t k) {
    SystemParams p = base;
    p.set(series_name, series[k / n]);
    return evaluate_point(grid[k % n], "nbar0", p, factory, eval);
  });
  Table t({series_name, "nbar0", "v_sq", "v_asq", "eta", "t_opt", "status"});
  for (size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& r = rows[k];
    const double t_opt = r.report && r.report->time ? *r.report->time : kNaN;
    t.add_row(concat(std::vector<Cell>{series[k / n], r.value}, report_cells(r.report),
                     std::vector<Cell>{t_opt, r.status}));
  }
  return t;
}

FigureResult fig2c(const RunConfig& config) {
  const SystemParams base = with_overrides(SystemParams{}, config);
  const Evaluation eval{EvaluationKind::kTransient, 40.0, 0.0};
  const std::vector<double> lambdas{base.lambda, threshold_coupling(base)};
  FigureResult out;
  out.doc.table = occupation_scan("lambda", lambdas, base, build_full_cs, eval);
  out.procedure = {{"model", "full"}, {"params", params_json(base)}, {"lambda", lambdas},
                   {"nbar0_grid", "0 and 25 log-spaced points in [1e-2, 1e2]"}, {"t_end", eval.t_end},
                   {"time_optimization", "stored-sample minimum with parabolic refinement"}};
  return out;
}

FigureResult fig3a(const RunConfig& config) {
  const SystemParams base = with_overrides(SystemParams{}, config);
  const auto alphas = linspace(0.0, 0.1, 101);
  Table t({"alpha", "omega_eff", "abs_omega_eff", "zeta_eff", "omega_eff_appendix"});
  for (double a : alphas) {
    SystemParams p = base;
    p.alpha = a;
    const EffectiveParams m = effective_modulated(p, ModulatedVariant::kMaintext);
    const EffectiveParams s = effective_modulated(p, ModulatedVariant::kAppendix);
    t.add_row({a, m.omega_eff, std::abs(m.omega_eff), m.zeta_eff, s.omega_eff});
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.procedure = {{"params", params_json(base)}, {"alpha_grid", "101 points in [0, 0.1]"}};
  return out;
}

ModelFactory modulated_factory(ModulatedVariant variant) {
  return [variant](const SystemParams& p) { return build_eliminated_modulated(p, variant); };
}

SystemParams modulated_base(const RunConfig& config) {
  SystemParams p;
  p.alpha = 0.01;
  return with_overrides(p, config);
}

FigureResult fig3b(const RunConfig& config) {
  const SystemParams base = modulated_base(config);
  const double t_end = 1000.0;
  const std::vector<double> phases{0.0, kPi / 2};
  const auto runs = parallel_map(phases.size(), [&](size_t i) {
    SystemParams p = base;
    p.phi = phases[i];
    const LinearGaussianModel model = build_eliminated_modulated(p, config.variant);
    return evolve(model, initial_covariance(model.basis(), p.nbar0), t_end, default_time_step(model));
  });
  FigureResult out;
  out.doc.table = stacked_trajectories({"phi"}, {{phases[0]}, {phases[1]}}, runs);
  out.procedure = {{"model", "eliminated-modulated"}, {"variant", to_string(config.variant)},
                   {"params", params_json(base)}, {"phi", phases}, {"t_end", t_end},
                   {"dt", runs.front().stats.dt}};
  return out;
}

FigureResult fig3c(const RunConfig& config) {
  const SystemParams base = modulated_base(config);
  const Evaluation eval{EvaluationKind::kTransient, 1000.0, 0.0};
  const std::vector<double> phases{0.0, kPi / 2};
  FigureResult out;
  out.doc.table = occupation_scan("phi", phases, base, modulated_factory(config.variant), eval);
  out.procedure = {{"model", "eliminated-modulated"}, {"variant", to_string(config.variant)},
                   {"params", params_json(base)}, {"phi", phases},
                   {"nbar0_grid", "0 and 25 log-spaced points in [1e-2, 1e2]"}, {"t_end", eval.t_end},
                   {"time_optimization", "stored-sample minimum with parabolic refinement"}};
  return out;
}

FigureResult fig3d(const RunConfig& config) {
  const SystemParams base = modulated_base(config);
  const Evaluation eval{EvaluationKind::kTransient, 1000.0, 0.0};
  const SweepAxis axis{"phi", 0.0, kPi, 33, AxisScale::kLinear};
  const auto rows = sweep(axis, base, modulated_factory(config.variant), eval);
  Table t({"phi", "v_sq", "v_asq", "eta", "t_opt", "status"});
  for (const SweepRow& r : rows) {
    const double t_opt = r.report && r.report->time ? *r.report->time : kNaN;
    t.add_row(concat(std::vector<Cell>{r.value}, report_cells(r.report), std::vector<Cell>{t_opt, r.status}));
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.procedure = {{"model", "eliminated-modulated"}, {"variant", to_string(config.variant)},
                   {"params", params_json(base)}, {"phi_grid", "33 points in [0, pi]"}, {"t_end", eval.t_end},
                   {"time_optimization", "stored-sample minimum with parabolic refinement"}};
  return out;
}

FigureResult fig4a(const RunConfig& config) {
  const SystemParams base = dissipative_base(config);
  const std::vector<double> qualities{1e8, 1e9};
  const int grid_points = 50;
  const DepthSearch search;
  Table t({"Q_m", "alpha", "v_sq", "v_asq", "eta", "V_alpha", "status"});
  nlohmann::json onsets = nlohmann::json::array();
  for (double q : qualities) {
    SystemParams p = base;
    p.set_quality_factor(q);
    const DepthOptimum onset = optimize_over_depth(p, search);
    onsets.push_back({{"Q_m", q}, {"alpha_crit", onset.alpha_crit}});
    std::vector<double> alphas = linspace(0.0, onset.alpha_crit, grid_points, false);
    alphas.push_back(onset.alpha_crit);
    const auto rows = parallel_map(alphas.size(), [&](size_t i) {
      SystemParams pi = p;
      pi.alpha = alphas[i];
      std::string status;
      auto report = steady_report(pi, status);
      return std::make_pair(report, status);
    });
    for (size_t i = 0; i < alphas.size(); ++i) {
      t.add_row(concat(std::vector<Cell>{q, alphas[i]}, report_cells(rows[i].first),
                       std::vector<Cell>{bogoliubov_ground_variance(alphas[i]), rows[i].second}));
    }
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.doc.summary = {{"onsets", onsets}};
  out.procedure = {{"model", "bogoliubov"}, {"params", params_json(base)}, {"Q_m", qualities},
                   {"alpha_grid", "50 points in [0, alpha_crit) plus alpha_crit"},
                   {"onset_tolerance", search.tolerance}};
  return out;
}

nlohmann::json depth_procedure(const DepthSearch& s) {
  return {{"alpha_max", s.alpha_max}, {"grid_points", s.grid_points}, {"tolerance", s.tolerance},
          {"refinement", "golden section between the neighbours of the best grid point"}};
}

FigureResult fig4b(const RunConfig& config) {
  const SystemParams base = dissipative_base(config);
  const auto qualities = logspace(1e6, 1e12, 25);
  const DepthSearch search;
  const auto optima = parallel_map(qualities.size(), [&](size_t i) {
    SystemParams p = base;
    p.set_quality_factor(qualities[i]);
    return optimize_over_depth(p, search);
  });
  Table t({"Q_m", "gamma_nbar", "alpha_crit", "alpha_opt", "v_sq", "v_asq", "eta"});
  for (size_t i = 0; i < qualities.size(); ++i) {
    SystemParams p = base;
    p.set_quality_factor(qualities[i]);
    const auto& o = optima[i];
    t.add_row({qualities[i], p.gamma * p.nbar / p.omega_x, o.alpha_crit, o.alpha_opt, o.report.v_sq, o.report.v_asq,
               o.report.eta});
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.procedure = {{"model", "bogoliubov"}, {"params", params_json(base)},
                   {"Q_m_grid", "25 log-spaced points in [1e6, 1e12]"}, {"depth_search", depth_procedure(search)}};
  return out;
}

FigureResult fig4c(const RunConfig& config) {
  const SystemParams base = dissipative_base(config);
  const std::vector<double> lambdas{0.3, 0.5};
  const auto kappas = logspace(1e-2, 1.0, 25);
  const DepthSearch search;
  const size_t n = kappas.size();
  struct Point {
    std::optional<DepthOptimum> optimum;
    std::string status;
  };
  const auto points = parallel_map(lambdas.size() * n, [&](size_t k) {
    SystemParams p = base;
    p.lambda = lambdas[k / n];
    p.kappa = kappas[k % n];
    Point pt;
    try {
      pt.optimum = optimize_over_depth(p, search);
      pt.status = "ok";
    } catch (const std::exception& e) {
      pt.status = e.what();
    }
    return pt;
  });
  Table t({"lambda", "kappa", "alpha_crit", "alpha_opt", "v_sq", "v_asq", "eta", "status"});
  for (size_t k = 0; k < points.size(); ++k) {
    const auto& o = points[k].optimum;
    std::vector<Cell> row{lambdas[k / n], kappas[k % n]};
    if (o) {
      row.insert(row.end(), {o->alpha_crit, o->alpha_opt, o->report.v_sq, o->report.v_asq, o->report.eta});
    } else {
      row.insert(row.end(), {kNaN, kNaN, kNaN, kNaN, kNaN});
    }
    row.push_back(points[k].status);
    t.add_row(std::move(row));
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.procedure = {{"model", "bogoliubov"}, {"params", params_json(base)}, {"lambda", lambdas},
                   {"kappa_grid", "25 log-spaced points in [1e-2, 1]"}, {"depth_search", depth_procedure(search)}};
  return out;
}

FigureResult figS5(const RunConfig& config) {
  const SystemParams base = dissipative_base(config);
  const std::vector<double> alphas{0.4, 0.1, 0.01};
  const auto phases = linspace(0.0, 2.0 * kPi, 32, false);
  const size_t n = phases.size();
  const auto rows = parallel_map(alphas.size() * n, [&](size_t k) {
    SystemParams p = base;
    p.alpha = alphas[k / n];
    p.phi = phases[k % n];
    std::string status;
    auto report = steady_report(p, status);
    return std::make_pair(report, status);
  });
  Table t({"alpha", "phi", "v_sq", "v_asq", "eta", "status"});
  for (size_t k = 0; k < rows.size(); ++k) {
    t.add_row(concat(std::vector<Cell>{alphas[k / n], phases[k % n]}, report_cells(rows[k].first),
                     std::vector<Cell>{rows[k].second}));
  }
  FigureResult out;
  out.doc.table = std::move(t);
  out.procedure = {{"model", "bogoliubov"}, {"params", params_json(base)}, {"alpha", alphas},
                   {"phi_grid", "32 points in [0, 2 pi)"}};
  return out;
}

}  // namespace

Table evolution_table(const EvolutionResult& run, bool lab_frame, double omega_x) {
  if (run.covariances.empty()) throw ValidationError("evolution_table: empty run");
  const QuadratureBasis& basis = run.covariances.front().basis();
  const bool cavity = basis.dim() == 4;
  std::vector<std::string> cols{"t", "Vxx", "Vxp", "Vpp", "v_sq", "v_asq", "eta"};
  if (cavity) cols.insert(cols.end(), {"VXX", "VXY", "VYY", "VXx", "VXp", "VYx", "VYp"});
  if (lab_frame) cols.insert(cols.end(), {"Vxx_rot", "Vxp_rot", "Vpp_rot"});
  Table t(cols);
  const int x = *basis.index_of("x");
  const int p = *basis.index_of("p");
  for (size_t i = 0; i < run.times.size(); ++i) {
    const CovarianceMatrix& v = run.covariances[i];
    const SqueezingReport r = squeezing_metrics(mechanical_block(v));
    std::vector<Cell> row{run.times[i], v(x, x), v(x, p), v(p, p), r.v_sq, r.v_asq, r.eta};
    if (cavity) {
      const int cx = *basis.index_of("X");
      const int cy = *basis.index_of("Y");
      row.insert(row.end(), {v(cx, cx), v(cx, cy), v(cy, cy), v(cx, x), v(cx, p), v(cy, x), v(cy, p)});
    }
    if (lab_frame) {
      const Matrix rot = to_rotating_frame(v.entries(), basis, omega_x, run.times[i]);
      row.insert(row.end(), {rot(x, x), rot(x, p), rot(p, p)});
    }
    t.add_row(std::move(row));
  }
  return t;
}

DepthOptimum optimize_over_depth(const SystemParams& params, const DepthSearch& search) {
  if (!(search.alpha_max > 0.0 && search.alpha_max < 2.0) || search.grid_points < 3 || !(search.tolerance > 0.0)) {
    throw ValidationError("optimize_over_depth: invalid search settings");
  }
  const auto family = [&](double a) {
    SystemParams p = params;
    p.alpha = a;
    return build_bogoliubov_dissipative(p);
  };
  if (!stability(family(0.0)).stable) {
    throw NoSteadyStateError("optimize_over_depth: unstable already at alpha = 0");
  }
  DepthOptimum out;
  out.alpha_crit = stability(family(search.alpha_max)).stable
                       ? search.alpha_max
                       : find_threshold(family, 0.0, search.alpha_max, search.tolerance).lo;

  const auto f = [&](double a) {
    SystemParams p = params;
    p.alpha = a;
    return steady_v_sq(p);
  };
  const auto grid = linspace(0.0, out.alpha_crit, search.grid_points);
  std::vector<double> values(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
  const size_t best = static_cast<size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  double alpha_opt = grid[best];
  double v_opt = values[best];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > search.tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  for (const auto& [x, v] : {std::pair{c, fc}, std::pair{d, fd}}) {
    if (v < v_opt) {
      v_opt = v;
      alpha_opt = x;
    }
  }
  SystemParams p = params;
  p.alpha = alpha_opt;
  out.alpha_opt = alpha_opt;
  out.report = squeezing_metrics(mechanical_block(steady_state(build_bogoliubov_dissipative(p)).covariance));
  return out;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c",
                                            "fig3d", "fig4a", "fig4b", "fig4c", "figS5"};
  return ids;
}

FigureResult run_figure(const std::string& id, const RunConfig& config) {
  FigureResult out;
  if (id == "fig2a") out = fig2a(config);
  else if (id == "fig2b") out = fig2b(config);
  else if (id == "fig2c") out = fig2c(config);
  else if (id == "fig3a") out = fig3a(config);
  else if (id == "fig3b") out = fig3b(config);
  else if (id == "fig3c") out = fig3c(config);
  else if (id == "fig3d") out = fig3d(config);
  else if (id == "fig4a") out = fig4a(config);
  else if (id == "fig4b") out = fig4b(config);
  else if (id == "fig4c") out = fig4c(config);
  else if (id == "figS5") out = figS5(config);
  else throw ValidationError("unknown figure '" + id + "'");
  out.procedure["figure"] = id;
  return out;
}

}  // namespace levisqueeze
