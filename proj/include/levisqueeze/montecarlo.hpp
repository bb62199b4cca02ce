#pragma once

// Trajectory-level oracle for the Lyapunov solver: integrates
// dr = A(t) r dt + L(t) dW with L L^T = N(t) by Euler-Maruyama and reduces the
// ensemble to sample covariances at a set of checkpoints.
//
// Sample covariances are plain second moments E[r r^T] of the simulated
// vectors. Initial vectors are drawn with covariance V0 and the noise has
// covariance N dt per step, so E[r r^T] obeys exactly the same Lyapunov
// equation as V.

#include "levisqueeze/dynamics.hpp"
#include "levisqueeze/gaussian.hpp"

#include <cstdint>
#include <vector>

namespace levisqueeze {

struct EnsembleSpec {
  long long n_traj = 10000;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  /// Checkpoints at t_end * k / checkpoints, k = 0..checkpoints.
  int checkpoints = 10;
  /// Trajectories per reduction block. Block partial sums are combined in
  /// block order, which makes the result independent of the thread count.
  int block_size = 64;
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<Matrix> covariances;
  std::vector<Matrix> standard_errors;
  ModelDescriptor model;
  long long n_traj = 0;
};

/// Validates spec against model: n_traj >= 2, dt > 0, t_end a whole number of
/// steps per checkpoint, and dt <= 0.005 / (largest drift rate).
void validate_spec(const LinearGaussianModel& model, const EnsembleSpec& spec);

/// Factor L with L L^T = N. Diagonal N uses elementwise square roots;
/// otherwise a pivoted LDL^T. Throws ValidationError for non-PSD N.
Matrix noise_factor(const Matrix& diffusion);

EnsembleResult simulate_ensemble(const LinearGaussianModel& model, const CovarianceMatrix& initial,
                                 const EnsembleSpec& spec);
/// Reference implementation: one thread, trajectories accumulated in index
/// order without blocking.
EnsembleResult simulate_ensemble_serial(const LinearGaussianModel& model, const CovarianceMatrix& initial,
                                        const EnsembleSpec& spec);

struct ComparisonReport {
  double max_abs_z = 0.0;
  double worst_time = 0.0;
  int worst_row = 0;
  int worst_col = 0;
  bool pass = false;
  /// z-scores per checkpoint (upper triangle, row-major).
  std::vector<std::vector<double>> z_scores;
};

inline constexpr double kZScoreLimit = 5.0;

/// z = (ensemble - lyapunov) / standard error for every independent entry at
/// every checkpoint; the Lyapunov trajectory is linearly interpolated in time.
ComparisonReport compare(const EnsembleResult& ensemble, const EvolutionResult& lyapunov);
ComparisonReport compare(const EnsembleResult& ensemble, const EnsembleResult& other);

}  // namespace levisqueeze
