#include "levisqueeze/errors.hpp"
#include "levisqueeze/gaussian.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace levisqueeze;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(QuadratureBasis, RejectsMalformedLabels) {
  EXPECT_THROW(QuadratureBasis({}), ValidationError);
  EXPECT_THROW(QuadratureBasis({"x"}), ValidationError);
  EXPECT_THROW(QuadratureBasis({"x", "x"}), ValidationError);
  EXPECT_THROW(QuadratureBasis({"a", "b", "c", "d", "e", "f"}), ValidationError);
  EXPECT_EQ(QuadratureBasis::cavity_mechanics().dim(), 4);
  EXPECT_EQ(*QuadratureBasis::cavity_mechanics().index_of("p"), 3);
  EXPECT_FALSE(QuadratureBasis::mechanics().index_of("X").has_value());
}

TEST(SymplecticForm, BlocksAndIdentities) {
  const Matrix o2 = symplectic_form(2).omega;
  EXPECT_EQ(o2, mat2(0, 1, -1, 0));
  const Matrix o4 = symplectic_form(4).omega;
  EXPECT_EQ(Matrix(o4.block(0, 0, 2, 2)), o2);
  EXPECT_EQ(Matrix(o4.block(2, 2, 2, 2)), o2);
  EXPECT_TRUE(o4.block(0, 2, 2, 2).isZero(0.0));
  EXPECT_TRUE((o4 * o4 + Matrix::Identity(4, 4)).isZero(0.0));
  EXPECT_TRUE((o4.transpose() + o4).isZero(0.0));
  EXPECT_THROW(symplectic_form(3), ValidationError);
}

TEST(DriftFromQuadratic, HarmonicOscillatorAndBareDecay) {
  const double w = 1.7;
  EXPECT_EQ(drift_from_quadratic(w * Matrix::Identity(2, 2), vec({0, 0})), mat2(0, w, -w, 0));
  EXPECT_EQ(drift_from_quadratic(Matrix::Zero(2, 2), vec({0.2, 0.2})), mat2(-0.2, 0, 0, -0.2));
  EXPECT_THROW(drift_from_quadratic(mat2(1, 2, 0, 1), vec({0, 0})), ValidationError);
  EXPECT_THROW(drift_from_quadratic(Matrix::Identity(2, 2), vec({-1, 0})), ValidationError);
}

TEST(DriftFromQuadratic, HamiltonianFlowPreservesSymplecticForm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix h(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = n(rng);
    h = (0.5 * (h + h.transpose())).eval();
    const Matrix a = drift_from_quadratic(h, Vector::Zero(4));
    const Matrix o = symplectic_form(4).omega;
    EXPECT_LT((a.transpose() * o + o * a).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LyapunovResidual, FixedPointsAndMiscalibration) {
  const double k = 0.2;
  EXPECT_TRUE(lyapunov_residual(-k * Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                2 * k * Matrix::Identity(2, 2)).isZero(0.0));
  const double w = 1.0, g = 1e-3, nbar = 10;
  const Matrix a = mat2(0, w, -w, -g);
  const Matrix v = (2 * nbar + 1) * Matrix::Identity(2, 2);
  EXPECT_LT(lyapunov_residual(a, v, mat2(0, 0, 0, 2 * g * (2 * nbar + 1))).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(lyapunov_residual(a, v, mat2(0, 0, 0, 4 * g * (2 * nbar + 1))).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_THROW(lyapunov_residual(a, Matrix::Identity(4, 4), a), ValidationError);
}

TEST(LyapunovResidual, LinearInCovarianceAndDiffusion) {
  const Matrix a = mat2(-0.1, 1, -1, -0.3);
  const Matrix v1 = mat2(2, 0.3, 0.3, 1), v2 = mat2(1, -0.2, -0.2, 4);
  const Matrix n1 = mat2(0.1, 0, 0, 0.2), n2 = mat2(0.3, 0.1, 0.1, 0.4);
  const Matrix lhs = lyapunov_residual(a, 2 * v1 + 3 * v2, 2 * n1 + 3 * n2);
  const Matrix rhs = 2 * lyapunov_residual(a, v1, n1) + 3 * lyapunov_residual(a, v2, n2);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CovarianceMatrix, ValidatesOnConstruction) {
  const auto b = QuadratureBasis::mechanics();
  EXPECT_NO_THROW(CovarianceMatrix(mat2(2, 0.5, 0.5, 1), b));
  EXPECT_THROW(CovarianceMatrix(mat2(2, 0.5, 0.4, 1), b), ValidationError);
  EXPECT_THROW(CovarianceMatrix(mat2(0, 0, 0, 1), b), ValidationError);
  EXPECT_THROW(CovarianceMatrix(mat2(std::nan(""), 0, 0, 1), b), ValidationError);
  EXPECT_THROW(CovarianceMatrix(Matrix::Identity(4, 4), b), ValidationError);
  const CovarianceMatrix near(mat2(2, 0.5, 0.5 + 1e-14, 1), b);
  EXPECT_EQ(near(0, 1), near(1, 0));
  EXPECT_EQ(CovarianceMatrix::identity(QuadratureBasis::cavity_mechanics()).entries(), Matrix::Identity(4, 4));
}

TEST(ValidateCovariance, PhysicalityExamples) {
  const CovarianceReport vac = validate_covariance(Matrix::Identity(2, 2));
  EXPECT_TRUE(vac.valid());
  const CovarianceReport sq = validate_covariance(mat2(0.5, 0, 0, 2));
  EXPECT_TRUE(sq.symmetric && sq.positive && sq.physical);
  EXPECT_NEAR(sq.min_uncertainty_eigenvalue, 0.0, 1e-12);
  const CovarianceReport bad = validate_covariance(mat2(0.5, 0, 0, 0.5));
  EXPECT_TRUE(bad.symmetric && bad.positive);
  EXPECT_FALSE(bad.physical);
  EXPECT_FALSE(validate_covariance(mat2(1, 0.5, 0.4, 1)).symmetric);
}

TEST(ValidateCovariance, SymplecticImagesOfPhysicalStatesStayPhysical) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = std::exp(4.0 * u(rng) - 2.0);
    const double th = 3.2 * u(rng);
    const double nth = 5.0 * u(rng);
    Matrix s = mat2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)) * mat2(r, 0, 0, 1.0 / r);
    const Matrix v = s * ((2 * nth + 1) * Matrix::Identity(2, 2)) * s.transpose();
    EXPECT_TRUE(validate_covariance(v).physical) << trial;
    EXPECT_FALSE(validate_covariance(0.9 * s * s.transpose()).physical) << trial;
  }
}

TEST(LinearGaussianModel, ConstantAndScaledDiffusion) {
  const auto m = LinearGaussianModel::constant(QuadratureBasis::mechanics(), mat2(0, 1, -1, -0.1),
                                               mat2(0, 0, 0, 0.2), {"test", {}});
  EXPECT_TRUE(m.is_time_independent());
  EXPECT_EQ(m.drift_at(3.0), m.drift_at(0.0));
  EXPECT_EQ(m.with_scaled_diffusion(2.0).diffusion_at(0.0), mat2(0, 0, 0, 0.4));
  EXPECT_THROW(LinearGaussianModel::constant(QuadratureBasis::mechanics(), mat2(0, 1, -1, 0), mat2(0, 0, 0, -1),
                                             {"bad", {}}),
               ValidationError);
  EXPECT_THROW(LinearGaussianModel::time_dependent(
                   QuadratureBasis::mechanics(), [](double) { return mat2(0, 1, -1, 0); },
                   [](double t) { return mat2(0, 0, 0, std::cos(t)); }, {"bad", {}}, {0.0, 3.0}),
               ValidationError);
}
