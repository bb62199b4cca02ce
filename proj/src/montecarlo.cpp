#include "levisqueeze/montecarlo.hpp"

#include "levisqueeze/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace levisqueeze {

namespace {

// Drift and noise factor for every step, shared read-only by all trajectories.
struct StepTables {
  int dim = 0;
  long long steps = 0;
  long long steps_per_checkpoint = 0;
  bool constant = true;
  std::vector<Matrix> drift;   // one entry when constant
  std::vector<Matrix> factor;  // one entry when constant
  std::vector<int> active_noise;  // columns of L that are not identically zero
  Matrix initial_factor;
};

double spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(a), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

long long step_count(const EnsembleSpec& spec) {
  return std::llround(spec.t_end / spec.dt);
}

StepTables build_tables(const LinearGaussianModel& model, const CovarianceMatrix& initial, const EnsembleSpec& spec) {
  validate_spec(model, spec);
  if (!(initial.basis() == model.basis())) {
    throw ValidationError("simulate_ensemble: initial covariance basis does not match the model");
  }
  StepTables tables;
  tables.dim = model.basis().dim();
  tables.steps = step_count(spec);
  tables.steps_per_checkpoint = tables.steps / spec.checkpoints;
  tables.constant = model.is_time_independent();
  const long long entries = tables.constant ? 1 : tables.steps;
  tables.drift.reserve(static_cast<size_t>(entries));
  tables.factor.reserve(static_cast<size_t>(entries));
  for (long long k = 0; k < entries; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    tables.drift.push_back(model.drift_at(t));
    tables.factor.push_back(noise_factor(model.diffusion_at(t)));
  }
  for (int col = 0; col < tables.dim; ++col) {
    bool any = false;
    for (const Matrix& l : tables.factor) any = any || !l.col(col).isZero(0.0);
    if (any) tables.active_noise.push_back(col);
  }
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(initial.entries())};
  if (llt.info() != Eigen::Success) {
    throw ValidationError("simulate_ensemble: initial covariance is not positive definite");
  }
  tables.initial_factor = Matrix(llt.matrixL());
  return tables;
}

// Running sums of r and r r^T per checkpoint.
struct Moments {
  std::vector<std::array<double, kMaxDim>> first;
  std::vector<std::array<double, kMaxDim * kMaxDim>> second;

  explicit Moments(size_t checkpoints) : first(checkpoints), second(checkpoints) {
    for (auto& f : first) f.fill(0.0);
    for (auto& s : second) s.fill(0.0);
  }

  void add(size_t c, const std::array<double, kMaxDim>& r, int dim) {
    for (int i = 0; i < dim; ++i) {
      first[c][i] += r[i];
      for (int j = 0; j < dim; ++j) second[c][i * kMaxDim + j] += r[i] * r[j];
    }
  }

  void merge(const Moments& other) {
    for (size_t c = 0; c < first.size(); ++c) {
      for (int i = 0; i < kMaxDim; ++i) first[c][i] += other.first[c][i];
      for (int i = 0; i < kMaxDim * kMaxDim; ++i) second[c][i] += other.second[c][i];
    }
  }
};

std::mt19937_64 trajectory_engine(std::uint64_t seed, long long index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 0x6c657669u};
  return std::mt19937_64(seq);
}

void run_trajectory(const StepTables& tables, const EnsembleSpec& spec, long long index, Moments& moments) {
  const int dim = tables.dim;
  std::mt19937_64 engine = trajectory_engine(spec.seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_dt = std::sqrt(spec.dt);

  std::array<double, kMaxDim> z{};
  std::array<double, kMaxDim> r{};
  std::array<double, kMaxDim> next{};
  for (int i = 0; i < dim; ++i) z[i] = normal(engine);
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += tables.initial_factor(i, j) * z[j];
    r[i] = acc;
  }
  moments.add(0, r, dim);

  for (long long k = 0; k < tables.steps; ++k) {
    const Matrix& a = tables.constant ? tables.drift[0] : tables.drift[static_cast<size_t>(k)];
    const Matrix& l = tables.constant ? tables.factor[0] : tables.factor[static_cast<size_t>(k)];
    for (int col : tables.active_noise) z[col] = normal(engine) * sqrt_dt;
    for (int i = 0; i < dim; ++i) {
      double drift = 0.0;
      for (int j = 0; j < dim; ++j) drift += a(i, j) * r[j];
      double noise = 0.0;
      for (int col : tables.active_noise) noise += l(i, col) * z[col];
      next[i] = r[i] + spec.dt * drift + noise;
    }
    r = next;
    if ((k + 1) % tables.steps_per_checkpoint == 0) {
      moments.add(static_cast<size_t>((k + 1) / tables.steps_per_checkpoint), r, dim);
    }
  }
}

EnsembleResult finalize(const LinearGaussianModel& model, const EnsembleSpec& spec, const StepTables& tables,
                        const Moments& moments) {
  EnsembleResult out;
  out.model = model.descriptor();
  out.n_traj = spec.n_traj;
  const int dim = tables.dim;
  const double n = static_cast<double>(spec.n_traj);
  for (int c = 0; c <= spec.checkpoints; ++c) {
    out.times.push_back(static_cast<double>(c * tables.steps_per_checkpoint) * spec.dt);
    Matrix cov(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double mi = moments.first[c][i] / n;
        const double mj = moments.first[c][j] / n;
        cov(i, j) = (moments.second[c][i * kMaxDim + j] - n * mi * mj) / (n - 1.0);
      }
    }
    cov = (0.5 * (cov + cov.transpose())).eval();
    Matrix se(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) se(i, j) = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / (n - 1.0));
    out.covariances.push_back(cov);
    out.standard_errors.push_back(se);
  }
  return out;
}

}  // namespace

void validate_spec(const LinearGaussianModel& model, const EnsembleSpec& spec) {
  if (spec.n_traj < 2) throw ValidationError("ensemble: n_traj must be at least 2");
  if (!(spec.dt > 0.0)) throw ValidationError("ensemble: dt must be positive");
  if (!(spec.t_end > 0.0)) throw ValidationError("ensemble: t_end must be positive");
  if (spec.checkpoints < 1) throw ValidationError("ensemble: need at least one checkpoint");
  if (spec.block_size < 1) throw ValidationError("ensemble: block size must be positive");
  const long long steps = step_count(spec);
  if (steps < 1 || std::abs(static_cast<double>(steps) * spec.dt - spec.t_end) > 1e-9 * spec.t_end) {
    throw ValidationError("ensemble: t_end must be a whole number of steps");
  }
  if (steps % spec.checkpoints != 0) {
    throw ValidationError("ensemble: step count " + std::to_string(steps) + " is not divisible by " +
                          std::to_string(spec.checkpoints) + " checkpoints");
  }
  double rate = spectral_radius(model.drift_at(0.0));
  if (!model.is_time_independent()) {
    for (int k = 1; k <= 16; ++k) rate = std::max(rate, spectral_radius(model.drift_at(spec.t_end * k / 16.0)));
  }
  if (rate > 0.0 && spec.dt > 0.005 / rate * (1.0 + 1e-12)) {
    throw ValidationError("ensemble: dt = " + std::to_string(spec.dt) + " exceeds 0.005 / max rate = " +
                          std::to_string(0.005 / rate));
  }
}

Matrix noise_factor(const Matrix& diffusion) {
  require_symmetric_psd(diffusion, "noise factor");
  const auto n = diffusion.rows();
  if (diffusion.isDiagonal(0.0)) {
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) l(i, i) = std::sqrt(std::max(0.0, diffusion(i, i)));
    return l;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt{Eigen::MatrixXd(diffusion)};
  if (ldlt.info() != Eigen::Success) {
    throw ValidationError("noise factor: LDL^T factorization failed");
  }
  const Eigen::VectorXd d = ldlt.vectorD();
  if ((d.array() < -1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff())).any()) {
    throw ValidationError("noise factor: diffusion is not positive semidefinite");
  }
  Eigen::MatrixXd lower = ldlt.matrixL();
  Eigen::MatrixXd scaled = lower * d.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Eigen::MatrixXd factor = ldlt.transpositionsP().transpose() * scaled;
  return Matrix(factor);
}

EnsembleResult simulate_ensemble(const LinearGaussianModel& model, const CovarianceMatrix& initial,
                                 const EnsembleSpec& spec) {
  const StepTables tables = build_tables(model, initial, spec);
  const size_t n_checkpoints = static_cast<size_t>(spec.checkpoints) + 1;
  const long long block = spec.block_size;
  const long long n_blocks = (spec.n_traj + block - 1) / block;
  std::vector<Moments> partial(static_cast<size_t>(n_blocks), Moments(n_checkpoints));

#pragma omp parallel for schedule(dynamic, 1)
  for (long long b = 0; b < n_blocks; ++b) {
    Moments& local = partial[static_cast<size_t>(b)];
    const long long end = std::min(spec.n_traj, (b + 1) * block);
    for (long long i = b * block; i < end; ++i) run_trajectory(tables, spec, i, local);
  }

  Moments total(n_checkpoints);
  for (const Moments& m : partial) total.merge(m);
  return finalize(model, spec, tables, total);
}

EnsembleResult simulate_ensemble_serial(const LinearGaussianModel& model, const CovarianceMatrix& initial,
                                        const EnsembleSpec& spec) {
  const StepTables tables = build_tables(model, initial, spec);
  Moments total(static_cast<size_t>(spec.checkpoints) + 1);
  for (long long i = 0; i < spec.n_traj; ++i) run_trajectory(tables, spec, i, total);
  return finalize(model, spec, tables, total);
}

namespace {

Matrix interpolate(const EvolutionResult& run, double t) {
  const auto& times = run.times;
  const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw ValidationError("compare: checkpoint t = " + std::to_string(t) + " lies outside the Lyapunov run");
  }
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return run.covariances.back().entries();
  const size_t hi = static_cast<size_t>(it - times.begin());
  if (hi == 0 || std::abs(*it - t) <= slack) return run.covariances[hi].entries();
  const size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * run.covariances[lo].entries() + w * run.covariances[hi].entries();
}

template <class Reference>
ComparisonReport compare_impl(const EnsembleResult& ensemble, Reference&& reference_at) {
  if (ensemble.n_traj < 100) {
    throw ValidationError("compare: need at least 100 trajectories for a meaningful z-test");
  }
  ComparisonReport report;
  for (size_t c = 0; c < ensemble.times.size(); ++c) {
    const Matrix ref = reference_at(c);
    const Matrix& cov = ensemble.covariances[c];
    const Matrix& se = ensemble.standard_errors[c];
    if (ref.rows() != cov.rows()) throw ValidationError("compare: dimension mismatch");
    std::vector<double> zs;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = i; j < cov.cols(); ++j) {
        const double diff = cov(i, j) - ref(i, j);
        double z = 0.0;
        if (se(i, j) > 0.0) {
          z = diff / se(i, j);
        } else if (diff != 0.0) {
          z = std::numeric_limits<double>::infinity();
        }
        zs.push_back(z);
        if (std::abs(z) > report.max_abs_z) {
          report.max_abs_z = std::abs(z);
          report.worst_time = ensemble.times[c];
          report.worst_row = static_cast<int>(i);
          report.worst_col = static_cast<int>(j);
        }
      }
    }
    report.z_scores.push_back(std::move(zs));
  }
  report.pass = report.max_abs_z < kZScoreLimit;
  return report;
}

}  // namespace

ComparisonReport compare(const EnsembleResult& ensemble, const EvolutionResult& lyapunov) {
  if (lyapunov.times.empty()) throw ValidationError("compare: empty Lyapunov run");
  return compare_impl(ensemble, [&](size_t c) { return interpolate(lyapunov, ensemble.times[c]); });
}

ComparisonReport compare(const EnsembleResult& ensemble, const EnsembleResult& other) {
  if (ensemble.times != other.times) throw ValidationError("compare: checkpoint grids differ");
  return compare_impl(ensemble, [&](size_t c) { return other.covariances[c]; });
}

}  // namespace levisqueeze
