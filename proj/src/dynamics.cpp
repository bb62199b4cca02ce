#include "levisqueeze/dynamics.hpp"

#include "levisqueeze/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levisqueeze {

namespace {

class LyapunovRhs {
 public:
  explicit LyapunovRhs(const LinearGaussianModel& model) : model_(model) {
    if (model.is_time_independent()) {
      drift_ = model.drift_at(0.0);
      diffusion_ = model.diffusion_at(0.0);
    }
  }

  Matrix operator()(double t, const Matrix& v) const {
    if (model_.is_time_independent()) return apply(drift_, diffusion_, v);
    return apply(model_.drift_at(t), model_.diffusion_at(t), v);
  }

 private:
  static Matrix apply(const Matrix& a, const Matrix& n, const Matrix& v) {
    Matrix av = a * v;
    Matrix out = av + av.transpose();
    out += n;
    return out;
  }

  const LinearGaussianModel& model_;
  Matrix drift_;
  Matrix diffusion_;
};

Matrix rk4_step(const LyapunovRhs& rhs, double t, const Matrix& v, double h) {
  const Matrix k1 = rhs(t, v);
  const Matrix k2 = rhs(t + 0.5 * h, v + (0.5 * h) * k1);
  const Matrix k3 = rhs(t + 0.5 * h, v + (0.5 * h) * k2);
  const Matrix k4 = rhs(t + h, v + h * k3);
  Matrix next = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.transpose());
}

std::string format_time(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

EvolutionResult evolve(const LinearGaussianModel& model, const CovarianceMatrix& initial, double t_end, double dt,
                       const EvolveOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("evolve: dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("evolve: t_end must be positive");
  if (!(initial.basis() == model.basis())) {
    throw ValidationError("evolve: initial covariance basis does not match the model basis");
  }
  const CovarianceReport initial_report = validate_covariance(initial.entries());
  if (!initial_report.valid()) {
    throw ValidationError("evolve: initial covariance violates the uncertainty relation");
  }

  const auto n_steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  const long long stride = std::max<long long>(1, (n_steps + options.max_stored - 1) / options.max_stored);
  const long long monitor_stride = std::max<long long>(1, n_steps / std::max<long long>(1, options.monitor_samples));

  EvolutionResult result;
  result.model = model.descriptor();
  result.stats.dt = dt;
  result.stats.storage_stride = stride;
  result.times.reserve(static_cast<size_t>(n_steps / stride + 2));
  result.covariances.reserve(static_cast<size_t>(n_steps / stride + 2));

  const LyapunovRhs rhs(model);
  const QuadratureBasis& basis = model.basis();

  auto store = [&](double t, const Matrix& v) {
    const CovarianceReport report = validate_covariance(v);
    if (!report.valid()) {
      throw IntegrationError("evolve: covariance left the physical set at t = " + format_time(t) +
                             " (min diagonal " + std::to_string(report.min_diagonal) + ", min eig(V + i Omega) " +
                             std::to_string(report.min_uncertainty_eigenvalue) + "); reduce dt");
    }
    result.times.push_back(t);
    result.covariances.emplace_back(v, basis);
  };

  Matrix v = initial.entries();
  store(0.0, v);
  for (long long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = (k + 1 == n_steps) ? t_end : static_cast<double>(k + 1) * dt;
    const double h = t_next - t;
    Matrix next = rk4_step(rhs, t, v, h);
    if (k % monitor_stride == 0) {
      const Matrix mid = rk4_step(rhs, t, v, 0.5 * h);
      const Matrix fine = rk4_step(rhs, t + 0.5 * h, mid, 0.5 * h);
      const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
      const double err = (fine - next).cwiseAbs().maxCoeff() / scale;
      result.stats.max_halving_error = std::max(result.stats.max_halving_error, err);
      ++result.stats.monitored_steps;
      if (!(err <= options.halving_tolerance)) {
        throw IntegrationError("evolve: step-halving error " + std::to_string(err) + " exceeds " +
                               std::to_string(options.halving_tolerance) + " at t = " + format_time(t) +
                               "; use a smaller dt");
      }
    }
    v = std::move(next);
    if (!v.allFinite()) {
      throw IntegrationError("evolve: non-finite covariance at t = " + format_time(t_next));
    }
    ++result.stats.steps;
    if ((k + 1) % stride == 0 || k + 1 == n_steps) store(t_next, v);
  }
  return result;
}

double default_time_step(const LinearGaussianModel& model) {
  const double rate = model.drift_at(0.0).cwiseAbs().rowwise().sum().maxCoeff();
  return rate > 0.0 ? std::min(0.05, 0.01 / rate) : 0.05;
}

StabilityReport stability(const Matrix& drift) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(drift), false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("stability: eigenvalue computation did not converge");
  }
  StabilityReport report;
  report.max_real_part = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<double> ev = solver.eigenvalues()(i);
    report.eigenvalues.push_back(ev);
    report.max_real_part = std::max(report.max_real_part, ev.real());
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  report.stable = report.max_real_part < 0.0;
  return report;
}

StabilityReport stability(const LinearGaussianModel& model, double at_time) {
  return stability(model.drift_at(at_time));
}

SteadyStateResult steady_state(const LinearGaussianModel& model) {
  if (!model.is_time_independent()) {
    throw ValidationError("steady_state: model '" + model.descriptor().variant + "' is time-dependent");
  }
  const Matrix a = model.drift_at(0.0);
  const Matrix n = model.diffusion_at(0.0);
  const StabilityReport stab = stability(a);
  if (!stab.stable) {
    throw NoSteadyStateError("steady_state: model '" + model.descriptor().variant +
                             "' is unstable (max Re eig = " + std::to_string(stab.max_real_part) + ")");
  }
  const double n_norm = n.norm();
  if (n_norm == 0.0) {
    throw ValidationError("steady_state: zero diffusion has no positive-definite fixed point");
  }

  const int d = static_cast<int>(a.rows());
  const int m = d * d;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const int row = i * d + j;
      for (int k = 0; k < d; ++k) {
        system(row, k * d + j) += a(i, k);
        system(row, i * d + k) += a(j, k);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw NumericalError("steady_state: Lyapunov system is singular");
  }

  auto unvec = [d](const Eigen::VectorXd& x) {
    Matrix out(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j) = x(i * d + j);
    return out;
  };
  auto vec = [d](const Matrix& mat) {
    Eigen::VectorXd out(d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i * d + j) = mat(i, j);
    return out;
  };

  Matrix v = unvec(lu.solve(-vec(n)));
  v = (0.5 * (v + v.transpose())).eval();
  Matrix residual = lyapunov_residual(a, v, n);
  // Iterative refinement; near an instability the system is ill-conditioned.
  for (int iter = 0; iter < 3 && residual.norm() > 1e-14 * n_norm; ++iter) {
    Matrix correction = unvec(lu.solve(-vec(residual)));
    v += 0.5 * (correction + correction.transpose());
    residual = lyapunov_residual(a, v, n);
  }
  const double residual_norm = residual.norm();
  const double scale = 2.0 * a.norm() * v.norm() + n_norm;
  if (!(residual_norm < 1e-10 * scale)) {
    throw NumericalError("steady_state: residual " + std::to_string(residual_norm) +
                         " exceeds 1e-10 (2|A||V| + |N|); the system is too ill-conditioned");
  }
  const CovarianceReport report = validate_covariance(v);
  if (!report.symmetric || !report.positive) {
    throw NumericalError("steady_state: solution is not a valid covariance matrix");
  }
  return SteadyStateResult{CovarianceMatrix(v, model.basis()), residual_norm, stab};
}

ThresholdResult find_threshold(const ModelFamily& family, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw ValidationError("find_threshold: tolerance must be positive");
  if (!(lo < hi)) throw ValidationError("find_threshold: bracket must satisfy lo < hi");
  const bool stable_lo = stability(family(lo)).stable;
  const bool stable_hi = stability(family(hi)).stable;
  if (stable_lo == stable_hi) {
    throw ValidationError(std::string("find_threshold: bracket endpoints are both ") +
                          (stable_lo ? "stable" : "unstable"));
  }
  ThresholdResult result{0.0, lo, hi, 0};
  while (result.hi - result.lo > tol) {
    const double mid = 0.5 * (result.lo + result.hi);
    if (mid <= result.lo || mid >= result.hi) break;  // bracket at machine resolution
    if (stability(family(mid)).stable == stable_lo) {
      result.lo = mid;
    } else {
      result.hi = mid;
    }
    ++result.iterations;
  }
  result.value = 0.5 * (result.lo + result.hi);
  return result;
}

}  // namespace levisqueeze
