#pragma once

#include "levisqueeze/gaussian.hpp"
#include "levisqueeze/models.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace levisqueeze {

struct IntegratorStats {
  long long steps = 0;
  double dt = 0.0;
  /// Largest relative difference between one step of dt and two steps of
  /// dt/2, over the monitored steps.
  double max_halving_error = 0.0;
  long long monitored_steps = 0;
  long long storage_stride = 1;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<CovarianceMatrix> covariances;
  ModelDescriptor model;
  IntegratorStats stats;
};

struct EvolveOptions {
  /// Step-halving monitor threshold; exceeding it raises IntegrationError.
  double halving_tolerance = 1e-6;
  /// Upper bound on stored samples (decimation stride is derived from it).
  long long max_stored = 5000;
  /// Number of steps at which the halving monitor runs (spread evenly, the
  /// first step always included).
  long long monitor_samples = 2000;
};

/// Fixed-step classical RK4 for dV/dt = A(t) V + V A(t)^T + N(t).
EvolutionResult evolve(const LinearGaussianModel& model, const CovarianceMatrix& initial, double t_end, double dt,
                       const EvolveOptions& options = {});

/// min(0.05, 0.01 / |A(0)|_inf): about a hundred steps per fastest rate.
double default_time_step(const LinearGaussianModel& model);

struct StabilityReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  bool stable = false;
};

StabilityReport stability(const Matrix& drift);
StabilityReport stability(const LinearGaussianModel& model, double at_time = 0.0);

struct SteadyStateResult {
  CovarianceMatrix covariance;
  double residual_norm = 0.0;
  StabilityReport stability;
};

/// Solves A V + V A^T + N = 0 through the Kronecker-sum linear system.
/// Throws NoSteadyStateError for unstable models and NumericalError when the
/// solve cannot reach residual < 1e-10 (2|A||V| + |N|).
SteadyStateResult steady_state(const LinearGaussianModel& model);

using ModelFamily = std::function<LinearGaussianModel(double)>;

struct ThresholdResult {
  double value = 0.0;   // midpoint of the final bracket
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection on the sign of max Re eig(A). The bracket endpoints must have
/// different stability flags (ValidationError otherwise); on return
/// hi - lo <= tol.
ThresholdResult find_threshold(const ModelFamily& family, double lo, double hi, double tol);

}  // namespace levisqueeze
