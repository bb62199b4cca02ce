#pragma once

#include "levisqueeze/dynamics.hpp"
#include "levisqueeze/gaussian.hpp"
#include "levisqueeze/models.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace levisqueeze {

struct SqueezingReport {
  double v_sq = 1.0;
  double v_asq = 1.0;
  double eta = 1.0;
  /// Direction of the squeezed quadrature x cos(angle) + p sin(angle), in [0, pi).
  double angle = 0.0;
  bool nonclassical = false;
  std::optional<double> time;
};

/// The (x, p) block. Throws ValidationError if the basis has no x/p labels.
CovarianceMatrix mechanical_block(const CovarianceMatrix& v);

SqueezingReport squeezing_metrics(const CovarianceMatrix& mechanical);

/// Minimum v_sq over the stored samples, refined by a parabola through the
/// minimum and its two neighbours (covariance entries are interpolated with the
/// same quadratic). Ties resolve to the earliest sample.
SqueezingReport optimize_over_time(const EvolutionResult& result);

/// Mean v_sq over the final `window` time units of the run (one mechanical
/// period is the usual choice for runs above threshold).
double quasistationary_v_sq(const EvolutionResult& result, double window);

enum class AxisScale { kLinear, kLog };

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;
  AxisScale scale = AxisScale::kLinear;

  std::vector<double> values() const;
};

AxisScale parse_axis_scale(std::string_view name);

enum class EvaluationKind { kTransient, kSteady };

EvaluationKind parse_evaluation(std::string_view name);

struct Evaluation {
  EvaluationKind kind = EvaluationKind::kSteady;
  double t_end = 0.0;
  double dt = 0.0;  // 0 selects default_time_step(model)
};

using ModelFactory = std::function<LinearGaussianModel(const SystemParams&)>;

struct SweepRow {
  double value = 0.0;
  SystemParams params;
  std::optional<SqueezingReport> report;
  std::string status;  // "ok", "unstable", or a diagnostic
};

/// Evaluates a single grid point; never throws for numerical trouble, which is
/// reported through status.
SweepRow evaluate_point(double value, const std::string& axis, const SystemParams& base,
                        const ModelFactory& factory, const Evaluation& evaluation);

/// One row per grid point, in grid order. Points run concurrently.
std::vector<SweepRow> sweep(const SweepAxis& axis, const SystemParams& base, const ModelFactory& factory,
                            const Evaluation& evaluation);
std::vector<SweepRow> sweep_serial(const SweepAxis& axis, const SystemParams& base, const ModelFactory& factory,
                                   const Evaluation& evaluation);

}  // namespace levisqueeze
