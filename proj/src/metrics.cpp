#include "levisqueeze/metrics.hpp"

#include "levisqueeze/errors.hpp"
#include "levisqueeze/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace levisqueeze {

CovarianceMatrix mechanical_block(const CovarianceMatrix& v) {
  const auto ix = v.basis().index_of("x");
  const auto ip = v.basis().index_of("p");
  if (!ix || !ip) {
    throw ValidationError("mechanical_block: basis has no x/p quadratures");
  }
  Matrix m(2, 2);
  m << v(*ix, *ix), v(*ix, *ip),
       v(*ip, *ix), v(*ip, *ip);
  return CovarianceMatrix(m, QuadratureBasis::mechanics());
}

SqueezingReport squeezing_metrics(const CovarianceMatrix& mechanical) {
  if (mechanical.dim() != 2) {
    throw ValidationError("squeezing_metrics: expected a 2x2 covariance matrix");
  }
  const double a = mechanical(0, 0);
  const double b = mechanical(0, 1);
  const double c = mechanical(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double v_asq = mean + radius;
  // det / v_asq avoids cancellation when the state is strongly squeezed.
  const double v_sq = (a * c - b * b) / v_asq;
  if (!(v_sq > 0.0) || !std::isfinite(v_asq)) {
    throw ValidationError("squeezing_metrics: covariance matrix is not positive definite");
  }

  // Variance along angle t is mean + (a - c)/2 cos 2t + b sin 2t.
  double angle = 0.5 * std::atan2(-b, -0.5 * (a - c));
  if (radius == 0.0) angle = 0.0;
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;

  SqueezingReport r;
  r.v_sq = std::min(v_sq, v_asq);
  r.v_asq = v_asq;
  r.eta = r.v_sq / r.v_asq;
  r.angle = angle;
  r.nonclassical = r.v_sq < 1.0;
  return r;
}

namespace {

// Quadratic through (t0, y0), (t1, y1), (t2, y2), evaluated at t.
double lagrange3(double t0, double t1, double t2, double y0, double y1, double y2, double t) {
  const double l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
  return l0 * y0 + l1 * y1 + l2 * y2;
}

}  // namespace

SqueezingReport optimize_over_time(const EvolutionResult& result) {
  if (result.covariances.empty()) {
    throw ValidationError("optimize_over_time: empty trajectory");
  }
  std::vector<double> v_sq(result.covariances.size());
  size_t best = 0;
  for (size_t i = 0; i < result.covariances.size(); ++i) {
    v_sq[i] = squeezing_metrics(mechanical_block(result.covariances[i])).v_sq;
    if (v_sq[i] < v_sq[best]) best = i;
  }
  SqueezingReport report = squeezing_metrics(mechanical_block(result.covariances[best]));
  report.time = result.times[best];
  if (best == 0 || best + 1 == v_sq.size()) return report;

  const double t0 = result.times[best - 1], t1 = result.times[best], t2 = result.times[best + 1];
  const double y0 = v_sq[best - 1], y1 = v_sq[best], y2 = v_sq[best + 1];
  const double d01 = (y1 - y0) / (t1 - t0);
  const double d12 = (y2 - y1) / (t2 - t1);
  const double curvature = (d12 - d01) / (t2 - t0);
  if (!(curvature > 0.0)) return report;
  // Vertex of the interpolating parabola.
  const double t_ref = 0.5 * (t0 + t1) - d01 / (2.0 * curvature);
  if (!(t_ref > t0 && t_ref < t2)) return report;

  const Matrix m0 = mechanical_block(result.covariances[best - 1]).entries();
  const Matrix m1 = mechanical_block(result.covariances[best]).entries();
  const Matrix m2 = mechanical_block(result.covariances[best + 1]).entries();
  Matrix interp(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) interp(i, j) = lagrange3(t0, t1, t2, m0(i, j), m1(i, j), m2(i, j), t_ref);
  try {
    SqueezingReport refined = squeezing_metrics(CovarianceMatrix(interp, QuadratureBasis::mechanics()));
    if (refined.v_sq < report.v_sq) {
      refined.time = t_ref;
      return refined;
    }
  } catch (const ValidationError&) {
  }
  return report;
}

double quasistationary_v_sq(const EvolutionResult& result, double window) {
  if (result.covariances.empty()) {
    throw ValidationError("quasistationary_v_sq: empty trajectory");
  }
  if (!(window > 0.0)) throw ValidationError("quasistationary_v_sq: window must be positive");
  const double t_last = result.times.back();
  if (t_last < window) {
    throw ValidationError("quasistationary_v_sq: run is shorter than the averaging window");
  }
  double sum = 0.0;
  int count = 0;
  for (size_t i = 0; i < result.times.size(); ++i) {
    if (result.times[i] >= t_last - window) {
      sum += squeezing_metrics(mechanical_block(result.covariances[i])).v_sq;
      ++count;
    }
  }
  return sum / count;
}

std::vector<double> SweepAxis::values() const {
  if (points < 1) throw ValidationError("sweep axis '" + name + "': points must be >= 1");
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw ValidationError("sweep axis '" + name + "': non-finite bounds");
  }
  if (scale == AxisScale::kLog && !(start > 0.0 && stop > 0.0)) {
    throw ValidationError("sweep axis '" + name + "': log scale needs positive bounds");
  }
  std::vector<double> out(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out[static_cast<size_t>(i)] = scale == AxisScale::kLinear
                                      ? start + f * (stop - start)
                                      : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
  }
  if (points > 1) out.back() = stop;
  return out;
}

AxisScale parse_axis_scale(std::string_view name) {
  if (name == "linear") return AxisScale::kLinear;
  if (name == "log") return AxisScale::kLog;
  throw ValidationError("unknown axis scale '" + std::string(name) + "' (expected linear or log)");
}

EvaluationKind parse_evaluation(std::string_view name) {
  if (name == "transient") return EvaluationKind::kTransient;
  if (name == "steady") return EvaluationKind::kSteady;
  throw ValidationError("unknown evaluation '" + std::string(name) + "' (expected transient or steady)");
}

SweepRow evaluate_point(double value, const std::string& axis, const SystemParams& base,
                        const ModelFactory& factory, const Evaluation& evaluation) {
  SweepRow row;
  row.value = value;
  row.params = base;
  try {
    row.params.set(axis, value);
    const LinearGaussianModel model = factory(row.params);
    if (evaluation.kind == EvaluationKind::kSteady) {
      const SteadyStateResult ss = steady_state(model);
      row.report = squeezing_metrics(mechanical_block(ss.covariance));
    } else {
      const double dt = evaluation.dt > 0.0 ? evaluation.dt : default_time_step(model);
      const EvolutionResult run =
          evolve(model, initial_covariance(model.basis(), row.params.nbar0), evaluation.t_end, dt);
      row.report = optimize_over_time(run);
    }
    row.status = "ok";
  } catch (const NoSteadyStateError&) {
    row.status = "unstable";
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep(const SweepAxis& axis, const SystemParams& base, const ModelFactory& factory,
                            const Evaluation& evaluation) {
  const std::vector<double> grid = axis.values();
  return parallel_map(grid.size(),
                      [&](size_t i) { return evaluate_point(grid[i], axis.name, base, factory, evaluation); });
}

std::vector<SweepRow> sweep_serial(const SweepAxis& axis, const SystemParams& base, const ModelFactory& factory,
                                   const Evaluation& evaluation) {
  const std::vector<double> grid = axis.values();
  return serial_map(grid.size(),
                    [&](size_t i) { return evaluate_point(grid[i], axis.name, base, factory, evaluation); });
}

}  // namespace levisqueeze
