#include "levisqueeze/gaussian.hpp"

#include "levisqueeze/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

namespace levisqueeze {

QuadratureBasis::QuadratureBasis(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw ValidationError("quadrature basis: no labels");
  }
  if (labels_.size() % 2 != 0) {
    throw ValidationError("quadrature basis: odd number of quadratures (" +
                          std::to_string(labels_.size()) + ")");
  }
  if (labels_.size() > static_cast<size_t>(kMaxDim)) {
    throw ValidationError("quadrature basis: at most " + std::to_string(kMaxDim) + " quadratures supported");
  }
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) {
    throw ValidationError("quadrature basis: duplicate labels");
  }
}

QuadratureBasis QuadratureBasis::cavity_mechanics() { return QuadratureBasis({"X", "Y", "x", "p"}); }

QuadratureBasis QuadratureBasis::mechanics() { return QuadratureBasis({"x", "p"}); }

std::optional<int> QuadratureBasis::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double relative_asymmetry(const Matrix& m) {
  const double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  return max_abs(m - m.transpose()) / scale;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix entries, QuadratureBasis basis)
    : entries_(std::move(entries)), basis_(std::move(basis)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() != basis_.dim()) {
    throw ValidationError("covariance matrix: shape does not match basis dimension " +
                          std::to_string(basis_.dim()));
  }
  if (!entries_.allFinite()) {
    throw ValidationError("covariance matrix: non-finite entries");
  }
  const double asym = relative_asymmetry(entries_);
  if (asym > kSymmetryTolerance) {
    throw ValidationError("covariance matrix: not symmetric (relative asymmetry " + std::to_string(asym) + ")");
  }
  if (entries_.diagonal().minCoeff() <= 0.0) {
    throw ValidationError("covariance matrix: non-positive diagonal entry");
  }
  Matrix sym = 0.5 * (entries_ + entries_.transpose());
  entries_ = sym;
}

CovarianceMatrix CovarianceMatrix::identity(const QuadratureBasis& basis) {
  return CovarianceMatrix(Matrix::Identity(basis.dim(), basis.dim()), basis);
}

SymplecticForm symplectic_form(int dim) {
  if (dim <= 0 || dim % 2 != 0 || dim > kMaxDim) {
    throw ValidationError("symplectic form: dimension must be even and in [2, " + std::to_string(kMaxDim) +
                          "], got " + std::to_string(dim));
  }
  Matrix omega = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return {omega};
}

SymplecticForm symplectic_form(const QuadratureBasis& basis) { return symplectic_form(basis.dim()); }

Matrix drift_from_quadratic(const Matrix& hamiltonian, const Vector& decay) {
  const auto n = hamiltonian.rows();
  if (hamiltonian.cols() != n || decay.size() != n) {
    throw ValidationError("drift_from_quadratic: dimension mismatch");
  }
  if (relative_asymmetry(hamiltonian) > kSymmetryTolerance) {
    throw ValidationError("drift_from_quadratic: Hamiltonian matrix is not symmetric");
  }
  if ((decay.array() < 0.0).any()) {
    throw ValidationError("drift_from_quadratic: negative decay rate");
  }
  const Matrix omega = symplectic_form(static_cast<int>(n)).omega;
  Matrix drift = omega * hamiltonian;
  drift.diagonal() -= decay;
  return drift;
}

Matrix lyapunov_residual(const Matrix& drift, const Matrix& covariance, const Matrix& diffusion) {
  const auto n = drift.rows();
  if (drift.cols() != n || covariance.rows() != n || covariance.cols() != n || diffusion.rows() != n ||
      diffusion.cols() != n) {
    throw ValidationError("lyapunov_residual: dimension mismatch");
  }
  Matrix r = drift * covariance;
  r += covariance * drift.transpose();
  r += diffusion;
  return r;
}

CovarianceReport validate_covariance(const Matrix& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw ValidationError("validate_covariance: matrix is not square");
  }
  CovarianceReport report;
  report.asymmetry = relative_asymmetry(covariance);
  report.symmetric = report.asymmetry <= kSymmetryTolerance;
  report.min_diagonal = covariance.diagonal().minCoeff();
  report.positive = report.min_diagonal > 0.0;

  const auto n = covariance.rows();
  if (n % 2 != 0) {
    report.physical = false;
    report.min_uncertainty_eigenvalue = -std::numeric_limits<double>::infinity();
    return report;
  }
  const Matrix omega = symplectic_form(static_cast<int>(n)).omega;
  const Matrix sym = 0.5 * (covariance + covariance.transpose());
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = std::complex<double>(sym(i, j), omega(i, j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  report.min_uncertainty_eigenvalue = solver.eigenvalues().minCoeff();
  report.physical = report.min_uncertainty_eigenvalue >= -kPhysicalTolerance;
  return report;
}

std::optional<double> ModelDescriptor::parameter(std::string_view name) const {
  for (const auto& [key, value] : parameters) {
    if (key == name) return value;
  }
  return std::nullopt;
}

void require_symmetric_psd(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": not square");
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
  if (relative_asymmetry(m) > kSymmetryTolerance) {
    throw ValidationError(std::string(what) + ": not symmetric");
  }
  const double scale = std::max(1.0, max_abs(m));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(m), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw ValidationError(std::string(what) + ": not positive semidefinite");
  }
}

LinearGaussianModel::LinearGaussianModel(QuadratureBasis basis, MatrixFunction drift, MatrixFunction diffusion,
                                         bool time_independent, ModelDescriptor descriptor)
    : basis_(std::move(basis)),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      time_independent_(time_independent),
      descriptor_(std::move(descriptor)) {}

LinearGaussianModel LinearGaussianModel::constant(QuadratureBasis basis, Matrix drift, Matrix diffusion,
                                                  ModelDescriptor descriptor) {
  const int n = basis.dim();
  if (drift.rows() != n || drift.cols() != n || diffusion.rows() != n || diffusion.cols() != n) {
    throw ValidationError("model '" + descriptor.variant + "': drift/diffusion do not match basis dimension");
  }
  require_symmetric_psd(diffusion, "model '" + descriptor.variant + "' diffusion");
  return LinearGaussianModel(
      std::move(basis), [drift](double) { return drift; }, [diffusion](double) { return diffusion; }, true,
      std::move(descriptor));
}

LinearGaussianModel LinearGaussianModel::time_dependent(QuadratureBasis basis, MatrixFunction drift,
                                                        MatrixFunction diffusion, ModelDescriptor descriptor,
                                                        const std::vector<double>& sample_times) {
  const int n = basis.dim();
  for (double t : sample_times) {
    const Matrix a = drift(t);
    const Matrix d = diffusion(t);
    if (a.rows() != n || a.cols() != n || d.rows() != n || d.cols() != n) {
      throw ValidationError("model '" + descriptor.variant + "': drift/diffusion do not match basis dimension");
    }
    require_symmetric_psd(d, "model '" + descriptor.variant + "' diffusion");
  }
  return LinearGaussianModel(std::move(basis), std::move(drift), std::move(diffusion), false,
                             std::move(descriptor));
}

Matrix LinearGaussianModel::drift_at(double t) const { return drift_(t); }

Matrix LinearGaussianModel::diffusion_at(double t) const { return diffusion_(t); }

LinearGaussianModel LinearGaussianModel::with_scaled_diffusion(double factor) const {
  if (!(factor >= 0.0)) {
    throw ValidationError("with_scaled_diffusion: factor must be non-negative");
  }
  auto inner = diffusion_;
  ModelDescriptor descriptor = descriptor_;
  descriptor.parameters.emplace_back("diffusion_scale", factor);
  return LinearGaussianModel(
      basis_, drift_, [inner, factor](double t) { return Matrix(factor * inner(t)); }, time_independent_,
      std::move(descriptor));
}

}  // namespace levisqueeze
