#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dcerm/solver.hpp"
#include "support.hpp"

using namespace dcerm;
namespace dt = dcerm::testing;

namespace {

LossSpec certified(LossFamily family, double ridge, const FeatureSpace& space, double y_bound) {
  LossSpec s;
  s.family = family;
  s.ridge = ridge;
  return certify_constants(s, {space.radius(), space.kappa(), y_bound});
}

Dataset one_d(std::initializer_list<double> xs, std::initializer_list<double> ys) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ys.size()));
  Eigen::Index i = 0;
  for (double v : xs) x(i++, 0) = v;
  i = 0;
  for (double v : ys) y(i++) = v;
  return Dataset::from_features(x, y);
}

}  // namespace

TEST(SolveErm, OneDimensionalRidge) {
  const auto space = FeatureSpace::linear(1, 2.0);
  const auto shard = one_d({1.0, -1.0}, {1.0, -1.0});
  const auto report = solve_erm(shard, certified(LossFamily::square, 1.0, space, 1.0), space);
  EXPECT_TRUE(report.converged);
  EXPECT_NEAR(report.predictor.weights(0), 0.5, 1e-8);
  EXPECT_LE(report.residual, report.tolerance);
}

TEST(SolveErm, RealizableShardReachesZeroRisk) {
  std::mt19937_64 rng(31);
  const auto space = FeatureSpace::linear(3, 2.0);
  const Eigen::VectorXd w0 = dt::in_ball(rng, 3, 1.5);
  Eigen::MatrixXd x(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) x.row(i) = dt::uniform_vector(rng, 3, -1, 1);
  const Dataset shard = Dataset::from_features(x, x * w0);
  const auto spec = certified(LossFamily::square, 0.0, space, 3.5);
  const auto report = solve_erm(shard, spec, space);
  ASSERT_TRUE(report.converged);
  EXPECT_LT(empirical_risk(spec, report.predictor.weights, shard), 1e-12);
  EXPECT_LT((report.predictor.weights - w0).norm(), 1e-6);
}

TEST(SolveErm, SingleExampleFromStartOne) {
  const auto space = FeatureSpace::linear(1, 2.0);
  SolveOptions opt;
  opt.start = Eigen::VectorXd::Constant(1, 1.0);
  const auto report =
      solve_erm(one_d({1.0}, {0.0}), certified(LossFamily::square, 0.0, space, 1.0), space, opt);
  EXPECT_TRUE(report.converged);
  EXPECT_NEAR(report.predictor.weights(0), 0.0, 1e-12);
}

TEST(SolveErm, DefaultTolerancesAndCaps) {
  EXPECT_DOUBLE_EQ(default_tolerance(0.0), 1e-8);
  EXPECT_DOUBLE_EQ(default_tolerance(3.0), 4e-8);
  const auto space = FeatureSpace::linear(1, 1.0);
  EXPECT_EQ(default_max_iter(certified(LossFamily::square, 0.5, space, 1.0)), 1'000'000u);
  EXPECT_EQ(default_max_iter(certified(LossFamily::logistic, 0.0, space, 1.0)), 100'000u);
}

TEST(SolveErm, RejectsBadInput) {
  const auto space = FeatureSpace::linear(1, 1.0);
  const auto spec = certified(LossFamily::square, 0.0, space, 1.0);
  EXPECT_THROW(solve_erm(Dataset{}, spec, space), std::invalid_argument);
  LossSpec raw;
  EXPECT_THROW(solve_erm(one_d({1}, {1}), raw, space), std::invalid_argument);
  EXPECT_THROW(solve_erm(Dataset::from_features(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d(1, 1)),
                         spec, space),
               std::invalid_argument);
}

TEST(SolveErm, NonConvergenceIsReported) {
  std::mt19937_64 rng(32);
  const auto space = FeatureSpace::linear(4, 5.0);
  const Dataset shard = dt::random_shard(rng, 30, 4);
  SolveOptions opt;
  opt.max_iter = 2;
  opt.tolerance = 1e-14;
  const auto report = solve_erm(shard, certified(LossFamily::logistic, 0.0, space, 1.0), space, opt);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.iterations, 2u);
  EXPECT_GT(report.residual, report.tolerance);
}

TEST(SolveErm, StartOutsideBallIsProjected) {
  const auto space = FeatureSpace::linear(2, 1.0);
  SolveOptions opt;
  opt.start = Eigen::Vector2d(30, 40);
  opt.max_iter = 1;
  opt.tolerance = 1e-300;
  const Dataset shard = Dataset::from_features(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(5, 5));
  const auto report = solve_erm(shard, certified(LossFamily::square, 0.0, space, 5.0), space, opt);
  EXPECT_LE(norm(report.predictor), 1.0);
}

TEST(SolveErm, PredictorStaysInBall) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const auto family = dt::kFamilies[trial % 4];
    const double radius = dt::uniform(rng, 0.05, 2.0);
    const auto space = FeatureSpace::linear(3, radius);
    Dataset shard = dt::random_shard(rng, 25, 3);
    if (family == LossFamily::logistic || family == LossFamily::squared_hinge)
      shard.labels = shard.labels.array().sign();
    const auto report = solve_erm(shard, certified(family, 0.0, space, 1.0), space);
    EXPECT_LE(norm(report.predictor), radius);
    if (report.converged) EXPECT_LE(report.residual, report.tolerance);
  }
}

TEST(SolveErm, MatchesClosedFormOnRandomShards) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng() % 8;
    const std::size_t n = 1 + rng() % 64;
    const Dataset shard = dt::random_shard(rng, n, d);
    const auto space = FeatureSpace::linear(d, 100.0);
    const double ridge = dt::uniform(rng, 0.5, 2.0);
    const auto report = solve_erm(shard, certified(LossFamily::square, ridge, space, 1.0), space);
    ASSERT_TRUE(report.converged);
    const auto exact = solve_ridge_closed_form(shard, ridge, space);
    EXPECT_LE(distance(report.predictor, exact), 10.0 * report.tolerance) << "trial " << trial;
  }
}

TEST(SolveErm, MonotoneDescent) {
  std::mt19937_64 rng(35);
  for (const auto family : dt::kFamilies) {
    const auto space = FeatureSpace::linear(4, 1.0);
    Dataset shard = dt::random_shard(rng, 40, 4);
    if (family == LossFamily::logistic || family == LossFamily::squared_hinge)
      shard.labels = shard.labels.array().sign();
    SolveOptions opt;
    opt.record_history = true;
    const auto report = solve_erm(shard, certified(family, 0.05, space, 1.0), space, opt);
    ASSERT_GE(report.risk_history.size(), 2u);
    for (std::size_t i = 1; i < report.risk_history.size(); ++i)
      ASSERT_LE(report.risk_history[i], report.risk_history[i - 1] * (1 + 1e-15) + 1e-300)
          << to_string(family) << " step " << i;
  }
}

TEST(SolveErm, Deterministic) {
  std::mt19937_64 rng(36);
  const auto space = FeatureSpace::linear(5, 1.0);
  const Dataset shard = dt::random_shard(rng, 50, 5);
  const auto spec = certified(LossFamily::squared_epsilon, 0.0, space, 1.0);
  SolveOptions opt;
  opt.record_history = true;
  const auto a = solve_erm(shard, spec, space, opt);
  const auto b = solve_erm(shard, spec, space, opt);
  EXPECT_EQ(a.predictor.weights, b.predictor.weights);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.converged, b.converged);
  EXPECT_EQ(a.risk_history, b.risk_history);
}

TEST(SolveErm, VariationalInequalityAtSolution) {
  std::mt19937_64 rng(37);
  for (const auto family : dt::kFamilies) {
    const auto space = FeatureSpace::linear(3, 0.3);
    Dataset shard = dt::random_shard(rng, 30, 3);
    shard.labels = 2.0 * shard.labels.array().sign();
    const auto spec = certified(family, 0.0, space, 2.0);
    const auto report = solve_erm(shard, spec, space);
    ASSERT_TRUE(report.converged) << to_string(family);
    const Eigen::VectorXd w_hat = report.predictor.weights;
    const Eigen::VectorXd g = empirical_gradient(spec, w_hat, shard);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd w = dt::in_ball(rng, 3, 0.3);
      ASSERT_GE(g.dot(w - w_hat), -report.tolerance * ((w - w_hat).norm() + 1.0))
          << to_string(family);
    }
  }
}

TEST(ClosedForm, Examples) {
  const auto space1 = FeatureSpace::linear(1, 1.0);
  EXPECT_NEAR(solve_ridge_closed_form(one_d({1, -1}, {1, -1}), 1.0, space1).weights(0), 0.5,
              1e-15);
  EXPECT_EQ(solve_ridge_closed_form(one_d({1, -1, 0.5}, {0, 0, 0}), 0.3, space1).weights(0), 0.0);

  const auto space2 = FeatureSpace::linear(2, 10.0);
  const double c = std::cos(0.5), s = std::sin(0.5);
  Eigen::Matrix2d phi;
  phi << c, s, -s, c;
  const Eigen::Vector2d y(0.7, -1.2);
  const auto f = solve_ridge_closed_form(Dataset::from_features(phi, y), 0.0, space2);
  EXPECT_LT((phi * f.weights - y).norm(), 1e-14);
  EXPECT_LT((f.weights - phi.transpose() * y).norm(), 1e-14);
}

TEST(ClosedForm, SingularWithoutRidgeThrows) {
  const auto space = FeatureSpace::linear(2, 1.0);
  const Dataset shard = Dataset::from_features(Eigen::MatrixXd::Zero(3, 2), Eigen::Vector3d(1, 2, 3));
  EXPECT_THROW(solve_ridge_closed_form(shard, 0.0, space), std::domain_error);
  EXPECT_NO_THROW(solve_ridge_closed_form(shard, 0.1, space));
}

TEST(CheckOptimality, Examples) {
  std::mt19937_64 rng(38);
  const auto space = FeatureSpace::linear(3, 100.0);
  const Dataset shard = dt::random_shard(rng, 20, 3);
  const auto spec = certified(LossFamily::square, 0.4, space, 1.0);
  EXPECT_LE(check_optimality(solve_ridge_closed_form(shard, 0.4, space), shard, spec, space), 1e-8);
  EXPECT_GT(check_optimality(Predictor::from_weights(space, Eigen::Vector3d(5, -5, 5)), shard, spec,
                             space),
            0.0);

  const Dataset flat = Dataset::from_features(Eigen::MatrixXd::Zero(4, 3), Eigen::Vector4d(1, -1, 2, 0));
  const auto plain = certified(LossFamily::square, 0.0, space, 2.0);
  for (int i = 0; i < 10; ++i) {
    const auto f = Predictor::from_weights(space, dt::in_ball(rng, 3, 100.0));
    EXPECT_EQ(check_optimality(f, flat, plain, space), 0.0);
  }
}

TEST(CheckOptimality, AgreesWithSolverResidual) {
  std::mt19937_64 rng(39);
  const auto space = FeatureSpace::linear(3, 0.5);
  const Dataset shard = dt::random_shard(rng, 20, 3);
  const auto spec = certified(LossFamily::logistic, 0.0, space, 1.0);
  SolveOptions opt;
  opt.max_iter = 3;
  opt.tolerance = 1e-300;
  const auto report = solve_erm(shard, spec, space, opt);
  EXPECT_NEAR(check_optimality(report.predictor, shard, spec, space), report.residual,
              1e-15 + 1e-12 * report.residual);
}
