#pragma once

// Linear Gaussian dynamics in quadrature form.
//
// Convention: V_ij = <r_i r_j + r_j r_i> - 2<r_i><r_j>, so the vacuum state of
// every mode has covariance equal to the identity and [x, p] = i.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace levisqueeze {

inline constexpr int kMaxDim = 4;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

inline constexpr double kSymmetryTolerance = 1e-12;   // relative
inline constexpr double kPhysicalTolerance = 1e-9;    // absolute

class QuadratureBasis {
 public:
  /// Labels must be unique and their count even (one x/p pair per mode).
  explicit QuadratureBasis(std::vector<std::string> labels);

  /// (X, Y, x, p): cavity field quadratures followed by the mechanical ones.
  static QuadratureBasis cavity_mechanics();
  /// (x, p)
  static QuadratureBasis mechanics();

  int dim() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> index_of(std::string_view label) const;

  bool operator==(const QuadratureBasis&) const = default;

 private:
  std::vector<std::string> labels_;
};

class CovarianceMatrix {
 public:
  /// Throws ValidationError unless entries are square, conformable with the
  /// basis, symmetric to kSymmetryTolerance and strictly positive on the
  /// diagonal. The stored matrix is exactly symmetrized.
  CovarianceMatrix(Matrix entries, QuadratureBasis basis);

  static CovarianceMatrix identity(const QuadratureBasis& basis);

  const Matrix& entries() const { return entries_; }
  const QuadratureBasis& basis() const { return basis_; }
  int dim() const { return basis_.dim(); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
  QuadratureBasis basis_;
};

struct SymplecticForm {
  Matrix omega;
};

/// Block-diagonal [[0, 1], [-1, 0]] per mode. Throws ValidationError on odd dim.
SymplecticForm symplectic_form(int dim);
SymplecticForm symplectic_form(const QuadratureBasis& basis);

/// Drift for H = 1/2 r^T H r with independent amplitude decay per quadrature:
/// A = Omega H - diag(decay).
Matrix drift_from_quadratic(const Matrix& hamiltonian, const Vector& decay);

/// A V + V A^T + N; zero exactly when V is a fixed point of the dynamics.
Matrix lyapunov_residual(const Matrix& drift, const Matrix& covariance, const Matrix& diffusion);

struct CovarianceReport {
  bool symmetric = false;
  double asymmetry = 0.0;          // max |V_ij - V_ji| / max |V_ij|
  bool positive = false;
  double min_diagonal = 0.0;
  bool physical = false;
  double min_uncertainty_eigenvalue = 0.0;  // min eig(V + i Omega)

  bool valid() const { return symmetric && positive && physical; }
};

/// Report-only check; never throws for square input of even dimension.
CovarianceReport validate_covariance(const Matrix& covariance);

/// Free-form identity of a model: a variant tag plus a flat parameter snapshot.
struct ModelDescriptor {
  std::string variant;
  std::vector<std::pair<std::string, double>> parameters;

  std::optional<double> parameter(std::string_view name) const;
};

/// dr = A(t) r dt + noise with <noise noise^T> giving diffusion N(t).
class LinearGaussianModel {
 public:
  using MatrixFunction = std::function<Matrix(double)>;

  static LinearGaussianModel constant(QuadratureBasis basis, Matrix drift, Matrix diffusion,
                                      ModelDescriptor descriptor);
  /// `sample_times` are the instants at which the diffusion is checked to be
  /// symmetric positive semidefinite at construction.
  static LinearGaussianModel time_dependent(QuadratureBasis basis, MatrixFunction drift,
                                            MatrixFunction diffusion, ModelDescriptor descriptor,
                                            const std::vector<double>& sample_times = {0.0});

  Matrix drift_at(double t) const;
  Matrix diffusion_at(double t) const;
  bool is_time_independent() const { return time_independent_; }
  const QuadratureBasis& basis() const { return basis_; }
  const ModelDescriptor& descriptor() const { return descriptor_; }

  /// Same drift, diffusion multiplied by `factor`. Used to build deliberately
  /// miscalibrated models for oracle checks.
  LinearGaussianModel with_scaled_diffusion(double factor) const;

 private:
  LinearGaussianModel(QuadratureBasis basis, MatrixFunction drift, MatrixFunction diffusion,
                      bool time_independent, ModelDescriptor descriptor);

  QuadratureBasis basis_;
  MatrixFunction drift_;
  MatrixFunction diffusion_;
  bool time_independent_;
  ModelDescriptor descriptor_;
};

/// Throws ValidationError unless the matrix is symmetric and PSD within round-off.
void require_symmetric_psd(const Matrix& m, std::string_view what);

}  // namespace levisqueeze
