#include "levisqueeze/errors.hpp"
#include "levisqueeze/metrics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace levisqueeze;

namespace {

constexpr double kPi = std::numbers::pi;

CovarianceMatrix mech(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return CovarianceMatrix(m, QuadratureBasis::mechanics());
}

EvolutionResult synthetic(const std::vector<double>& times, const std::function<CovarianceMatrix(double)>& v) {
  EvolutionResult r;
  for (double t : times) {
    r.times.push_back(t);
    r.covariances.push_back(v(t));
  }
  return r;
}

}  // namespace

TEST(SqueezingMetrics, DiagonalAndVacuum) {
  const SqueezingReport r = squeezing_metrics(mech(0.5, 0.0, 2.0));
  EXPECT_DOUBLE_EQ(r.v_sq, 0.5);
  EXPECT_DOUBLE_EQ(r.v_asq, 2.0);
  EXPECT_DOUBLE_EQ(r.eta, 0.25);
  EXPECT_DOUBLE_EQ(r.angle, 0.0);
  EXPECT_TRUE(r.nonclassical);
  const SqueezingReport v = squeezing_metrics(mech(1.0, 0.0, 1.0));
  EXPECT_EQ(v.v_sq, 1.0);
  EXPECT_EQ(v.v_asq, 1.0);
  EXPECT_EQ(v.eta, 1.0);
  EXPECT_FALSE(v.nonclassical);
  EXPECT_NEAR(squeezing_metrics(mech(2.0, 0.0, 0.5)).angle, kPi / 2, 1e-15);
  EXPECT_THROW(squeezing_metrics(CovarianceMatrix::identity(QuadratureBasis::cavity_mechanics())), ValidationError);
}

TEST(SqueezingMetrics, RotatedStateReportsRotationAngle) {
  oracle::Mat d(2, 2);
  d << 0.5, 0, 0, 2;
  const oracle::Mat v = oracle::rotation(0.7) * d * oracle::rotation(0.7).transpose();
  const SqueezingReport r = squeezing_metrics(mech(v(0, 0), v(0, 1), v(1, 1)));
  EXPECT_NEAR(r.v_sq, 0.5, 1e-14);
  EXPECT_NEAR(r.v_asq, 2.0, 1e-14);
  EXPECT_NEAR(r.angle, 0.7, 1e-14);
}

TEST(SqueezingMetrics, RotationInvarianceAndUncertaintyBound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double s = std::exp(3.0 * u(rng) - 1.5);
    const double nth = 3.0 * u(rng);
    const double th0 = kPi * u(rng);
    const double rot = 2 * kPi * u(rng);
    oracle::Mat d(2, 2);
    d << (2 * nth + 1) * s, 0, 0, (2 * nth + 1) / s;
    const oracle::Mat v = oracle::rotation(th0) * d * oracle::rotation(th0).transpose();
    const oracle::Mat w = oracle::rotation(rot) * v * oracle::rotation(rot).transpose();
    const SqueezingReport a = squeezing_metrics(mech(v(0, 0), v(0, 1), v(1, 1)));
    const SqueezingReport b = squeezing_metrics(mech(w(0, 0), w(0, 1), w(1, 1)));
    EXPECT_NEAR(a.v_sq, b.v_sq, 1e-12 * a.v_asq);
    EXPECT_NEAR(a.v_asq, b.v_asq, 1e-12 * a.v_asq);
    EXPECT_GE(a.v_sq * a.v_asq, 1.0 - 1e-12);
    EXPECT_GT(a.eta, 0.0);
    EXPECT_LE(a.eta, 1.0);
    if (std::abs(s - 1.0) > 1e-3) {
      const double shift = std::remainder(b.angle - a.angle - rot, kPi);
      EXPECT_NEAR(shift, 0.0, 1e-9) << trial;
    }
  }
}

TEST(MechanicalBlock, ExtractsPositionMomentum) {
  const CovarianceMatrix two = mech(0.5, 0.1, 2.0);
  EXPECT_EQ(mechanical_block(two).entries(), two.entries());
  Matrix m = Matrix::Identity(4, 4);
  m(2, 2) = 0.5;
  m(3, 3) = 2.0;
  const CovarianceMatrix blk = mechanical_block(CovarianceMatrix(m, QuadratureBasis::cavity_mechanics()));
  EXPECT_EQ(blk(0, 0), 0.5);
  EXPECT_EQ(blk(1, 1), 2.0);
  EXPECT_THROW(mechanical_block(CovarianceMatrix::identity(QuadratureBasis({"X", "Y"}))), ValidationError);
}

TEST(OptimizeOverTime, ConstantTrajectoryPicksStart) {
  const auto r = optimize_over_time(synthetic({0, 1, 2, 3}, [](double) { return mech(0.7, 0, 1.5); }));
  ASSERT_TRUE(r.time.has_value());
  EXPECT_EQ(*r.time, 0.0);
  EXPECT_DOUBLE_EQ(r.v_sq, 0.7);
  EXPECT_THROW(optimize_over_time(EvolutionResult{}), ValidationError);
}

TEST(OptimizeOverTime, ParabolicRefinementIsExactForQuadratics) {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
  const double t_star = 0.337;
  const auto r = optimize_over_time(
      synthetic(grid, [&](double t) { return mech(0.5 + (t - t_star) * (t - t_star), 0.0, 3.0); }));
  EXPECT_NEAR(*r.time, t_star, 1e-12);
  EXPECT_NEAR(r.v_sq, 0.5, 1e-12);
}

TEST(OptimizeOverTime, FirstDipWithinFirstHalfPeriod) {
  const SystemParams p;
  const auto m = build_full_cs(p);
  const auto run = evolve(m, initial_covariance(m.basis(), 0.0), 20.0, default_time_step(m));
  const EffectiveParams e = effective_detuned(p);
  const double period = 2 * kPi / std::sqrt(e.omega_eff * e.omega_eff - e.zeta_eff * e.zeta_eff);
  // Restrict to the first period, then locate the optimum.
  EvolutionResult first;
  for (size_t i = 0; i < run.times.size() && run.times[i] <= period; ++i) {
    first.times.push_back(run.times[i]);
    first.covariances.push_back(run.covariances[i]);
  }
  const auto r = optimize_over_time(first);
  EXPECT_GT(*r.time, 0.0);
  EXPECT_LT(*r.time, period / 2);
  EXPECT_LT(r.v_sq, 1.0);
  for (size_t i = 1; i < run.times.size(); ++i) {
    const double a = squeezing_metrics(mechanical_block(run.covariances[i - 1])).v_sq;
    const double b = squeezing_metrics(mechanical_block(run.covariances[i])).v_sq;
    ASSERT_LT(std::abs(b - a), 0.1 * a) << run.times[i];
  }
}

TEST(OptimizeOverTime, OptimumImprovesWithCouplingUpToThreshold) {
  SystemParams base;
  const double l_th = threshold_coupling(base);
  double prev = 1e300;
  for (double l : {0.3, 0.6, 0.9, 1.2, 1.4, 1.5, 1.55, l_th}) {
    SystemParams p = base;
    p.lambda = l;
    const auto m = build_full_cs(p);
    const double v = optimize_over_time(evolve(m, initial_covariance(m.basis(), 0.0), 40.0, default_time_step(m))).v_sq;
    EXPECT_LT(v, prev) << l;
    prev = v;
  }
}

TEST(Quasistationary, AveragesFinalWindow) {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  const auto run = synthetic(grid, [](double t) { return mech(t < 5 ? 3.0 : 0.5, 0.0, 4.0); });
  EXPECT_DOUBLE_EQ(quasistationary_v_sq(run, 2.0), 0.5);
  EXPECT_THROW(quasistationary_v_sq(run, 20.0), ValidationError);
  EXPECT_THROW(quasistationary_v_sq(run, 0.0), ValidationError);
}

TEST(SweepAxis, GridEndpoints) {
  const auto lin = SweepAxis{"lambda", 0.1, 1.5, 15, AxisScale::kLinear}.values();
  ASSERT_EQ(lin.size(), 15u);
  EXPECT_EQ(lin.front(), 0.1);
  EXPECT_EQ(lin.back(), 1.5);
  EXPECT_NEAR(lin[1] - lin[0], 0.1, 1e-15);
  const auto lg = SweepAxis{"quality_factor", 1e6, 1e12, 7, AxisScale::kLog}.values();
  EXPECT_EQ(lg.back(), 1e12);
  EXPECT_NEAR(lg[3], 1e9, 1e-3);
  EXPECT_THROW((SweepAxis{"q", 0.0, 1.0, 3, AxisScale::kLog}.values()), ValidationError);
  EXPECT_THROW((SweepAxis{"q", 0.0, 1.0, 0, AxisScale::kLinear}.values()), ValidationError);
  EXPECT_EQ(parse_axis_scale("log"), AxisScale::kLog);
  EXPECT_THROW(parse_axis_scale("exp"), ValidationError);
}

TEST(Sweep, SinglePointEqualsDirectEvaluation) {
  SystemParams base;
  const Evaluation eval{EvaluationKind::kSteady, 0.0, 0.0};
  const auto rows = sweep(SweepAxis{"lambda", 0.7, 0.7, 1, AxisScale::kLinear}, base, build_full_cs, eval);
  ASSERT_EQ(rows.size(), 1u);
  base.lambda = 0.7;
  const auto direct = squeezing_metrics(mechanical_block(steady_state(build_full_cs(base)).covariance));
  ASSERT_TRUE(rows[0].report.has_value());
  EXPECT_EQ(rows[0].report->v_sq, direct.v_sq);
  EXPECT_EQ(rows[0].params.lambda, 0.7);
  EXPECT_EQ(rows[0].status, "ok");
}

TEST(Sweep, UnstablePointsAreMarkedNotFatal) {
  const Evaluation eval{EvaluationKind::kSteady, 0.0, 0.0};
  const auto rows =
      sweep(SweepAxis{"lambda", 1.0, 2.0, 11, AxisScale::kLinear}, SystemParams{}, build_eliminated_detuned, eval);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows.front().status, "ok");
  EXPECT_EQ(rows.back().status, "unstable");
  EXPECT_FALSE(rows.back().report.has_value());
  const auto bad = sweep(SweepAxis{"kappa", -1.0, 0.2, 2, AxisScale::kLinear}, SystemParams{}, build_full_cs, eval);
  EXPECT_NE(bad[0].status.find("kappa"), std::string::npos);
  EXPECT_EQ(bad[1].status, "ok");
}

TEST(Sweep, ParallelMatchesSerialBitForBit) {
  SystemParams base;
  base.delta = base.omega_x;
  const Evaluation steady{EvaluationKind::kSteady, 0.0, 0.0};
  const SweepAxis axis{"alpha", 0.0, 0.45, 24, AxisScale::kLinear};
  const auto a = sweep(axis, base, build_bogoliubov_dissipative, steady);
  const auto b = sweep_serial(axis, base, build_bogoliubov_dissipative, steady);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].status, b[i].status);
    EXPECT_EQ(a[i].value, b[i].value);
    if (a[i].report) {
      EXPECT_EQ(a[i].report->v_sq, b[i].report->v_sq);
    }
  }
  const Evaluation transient{EvaluationKind::kTransient, 10.0, 0.0};
  const SweepAxis nb{"nbar0", 0.0, 2.0, 5, AxisScale::kLinear};
  const auto c = sweep(nb, SystemParams{}, build_full_cs, transient);
  const auto d = sweep_serial(nb, SystemParams{}, build_full_cs, transient);
  for (size_t i = 0; i < c.size(); ++i) {
    ASSERT_TRUE(c[i].report && d[i].report);
    EXPECT_EQ(c[i].report->v_sq, d[i].report->v_sq);
    EXPECT_EQ(*c[i].report->time, *d[i].report->time);
  }
}
