#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dcerm/risk.hpp"
#include "support.hpp"

using namespace dcerm;
namespace dt = dcerm::testing;

namespace {

LossSpec certified(LossFamily family, double ridge, const DistributionSpec& dist) {
  LossSpec s;
  s.family = family;
  s.ridge = ridge;
  return certify_constants(s, dist.loss_domain());
}

DistributionSpec unit_interval_target(double sigma) {
  // S^0 = {-1, +1}, so E[x^2] = 1.
  return DistributionSpec::make(FeatureSpace::linear(1, 2.0, InputDomain::sphere),
                                Eigen::VectorXd::Constant(1, 1.0), NoiseLaw::uniform, sigma);
}

}  // namespace

TEST(Distribution, MakeValidatesAndDefaultsBound) {
  const auto space = FeatureSpace::linear(2, 1.0);
  EXPECT_THROW(DistributionSpec::make(space, Eigen::Vector3d::Zero(), NoiseLaw::uniform, 0.1),
               std::invalid_argument);
  EXPECT_THROW(DistributionSpec::make(space, Eigen::Vector2d(3, 4), NoiseLaw::uniform, 0.1),
               std::invalid_argument);
  EXPECT_THROW(DistributionSpec::make(space, Eigen::Vector2d(0, 0), NoiseLaw::uniform, -1.0),
               std::invalid_argument);
  const auto d = DistributionSpec::make(space, Eigen::Vector2d(0.6, -0.3), NoiseLaw::uniform, 0.2);
  EXPECT_DOUBLE_EQ(d.label_bound, 0.9 + 0.2);
  EXPECT_FALSE(d.clipping_possible());
  const auto clipped =
      DistributionSpec::make(space, Eigen::Vector2d(0.6, -0.3), NoiseLaw::uniform, 0.2,
                             LabelRule::regression, 0.5);
  EXPECT_TRUE(clipped.clipping_possible());
  const auto sign = DistributionSpec::make(space, Eigen::Vector2d(0.6, -0.3), NoiseLaw::uniform, 0.2,
                                           LabelRule::sign);
  EXPECT_EQ(sign.label_bound, 1.0);
}

TEST(Distribution, NoiseSecondMoment) {
  const auto space = FeatureSpace::linear(1, 1.0);
  EXPECT_NEAR(DistributionSpec::make(space, Eigen::VectorXd::Zero(1), NoiseLaw::uniform, 0.3)
                  .noise_second_moment(),
              0.03, 1e-15);
  EXPECT_NEAR(DistributionSpec::make(space, Eigen::VectorXd::Zero(1), NoiseLaw::rademacher, 0.3)
                  .noise_second_moment(),
              0.09, 1e-15);
}

TEST(SampleDataset, NoiselessLabelsAreExact) {
  std::mt19937_64 rng(51);
  const auto space = FeatureSpace::eigen_decay(5, 1.0, 2.0);
  const Eigen::VectorXd w = dt::in_ball(rng, 5, 2.0);
  const auto dist = DistributionSpec::make(space, w, NoiseLaw::uniform, 0.0);
  const Dataset data = sample_dataset(dist, 500, 1);
  ASSERT_EQ(data.size(), 500u);
  EXPECT_LT((data.features * w - data.labels).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((feature_map_rows(space, data.inputs) - data.features).norm(), 1e-15);
}

TEST(SampleDataset, ZeroSizeRejected) {
  EXPECT_THROW(sample_dataset(unit_interval_target(0.1), 0, 1), std::invalid_argument);
}

TEST(SampleDataset, DeterministicPerSeed) {
  const auto dist = unit_interval_target(0.3);
  const Dataset a = sample_dataset(dist, 100, 7);
  const Dataset b = sample_dataset(dist, 100, 7);
  const Dataset c = sample_dataset(dist, 100, 8);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.labels, c.labels);
}

TEST(SampleDataset, LabelsRespectBoundAndDomain) {
  const auto space = FeatureSpace::linear(3, 2.0, InputDomain::sphere);
  const auto dist = DistributionSpec::make(space, Eigen::Vector3d(1.5, 0, 0), NoiseLaw::rademacher,
                                           0.5, LabelRule::regression, 1.0);
  const Dataset data = sample_dataset(dist, 5000, 3);
  EXPECT_LE(data.labels.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i)
    ASSERT_NEAR(data.inputs.row(i).norm(), 1.0, 1e-12);
  const auto sign = DistributionSpec::make(space, Eigen::Vector3d(1.5, 0, 0), NoiseLaw::uniform,
                                           0.0, LabelRule::sign);
  const Dataset s = sample_dataset(sign, 2000, 4);
  for (Eigen::Index i = 0; i < s.labels.size(); ++i) {
    ASSERT_EQ(std::abs(s.labels(i)), 1.0);
    ASSERT_EQ(s.labels(i) > 0, s.inputs(i, 0) >= 0);
  }
}

TEST(AnalyticRisk, Examples) {
  const auto dist = unit_interval_target(0.0);
  const auto spec = certified(LossFamily::square, 0.0, dist);
  EXPECT_DOUBLE_EQ(population_risk_analytic(Predictor::zero(dist.space), dist, spec).value, 1.0);

  const auto noisy = unit_interval_target(0.3);
  const auto f_star = Predictor::from_weights(noisy.space, noisy.true_weights);
  const auto r = population_risk_analytic(f_star, noisy, certified(LossFamily::square, 0.0, noisy));
  EXPECT_NEAR(r.value, 0.03, 1e-15);
  EXPECT_EQ(r.stderr_, 0.0);
  EXPECT_EQ(r.method, RiskMethod::analytic);
}

TEST(AnalyticRisk, UnavailableCasesThrow) {
  const auto dist = unit_interval_target(0.3);
  const auto logistic = certified(LossFamily::logistic, 0.0, dist);
  EXPECT_FALSE(analytic_risk_available(dist, logistic));
  EXPECT_THROW(population_risk_analytic(Predictor::zero(dist.space), dist, logistic),
               std::domain_error);
  const auto clipped = DistributionSpec::make(dist.space, dist.true_weights, NoiseLaw::uniform, 0.3,
                                              LabelRule::regression, 1.0);
  EXPECT_FALSE(analytic_risk_available(clipped, certified(LossFamily::square, 0.0, clipped)));
  EXPECT_EQ(population_risk(Predictor::zero(dist.space), clipped,
                            certified(LossFamily::square, 0.0, clipped), 1000, 1)
                .method,
            RiskMethod::monte_carlo);
}

TEST(MonteCarloRisk, AgreesWithAnalyticOn50Predictors) {
  std::mt19937_64 rng(52);
  int disagreements = 0;
  for (int i = 0; i < 50; ++i) {
    const auto domain = i % 2 ? InputDomain::sphere : InputDomain::hypercube;
    const auto space = i % 3 ? FeatureSpace::linear(3, 2.0, domain)
                             : FeatureSpace::eigen_decay(6, 1.0, 2.0, domain);
    const auto dist = DistributionSpec::make(space, dt::in_ball(rng, space.dim(), 1.0),
                                             i % 4 ? NoiseLaw::uniform : NoiseLaw::rademacher, 0.3);
    const auto spec = certified(LossFamily::square, i % 5 ? 0.0 : 0.1, dist);
    const auto f = Predictor::from_weights(space, dt::in_ball(rng, space.dim(), 2.0));
    const auto exact = population_risk_analytic(f, dist, spec);
    const auto mc = population_risk_mc(f, dist, spec, 20'000, 1000 + i);
    EXPECT_EQ(mc.method, RiskMethod::monte_carlo);
    EXPECT_EQ(mc.samples, 20'000u);
    if (std::abs(mc.value - exact.value) > 4.0 * mc.stderr_) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(MonteCarloRisk, StderrScalesWithSampleSize) {
  const auto dist = unit_interval_target(0.3);
  const auto spec = certified(LossFamily::square, 0.0, dist);
  const auto f = Predictor::zero(dist.space);
  double ratio = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r)
    ratio += population_risk_mc(f, dist, spec, 8000, 2 * r).stderr_ /
             population_risk_mc(f, dist, spec, 4000, 2 * r + 1).stderr_;
  ratio /= reps;
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(MonteCarloRisk, DeterministicLossHasZeroStderr) {
  const auto dist = unit_interval_target(0.0);
  const auto spec = certified(LossFamily::square, 0.0, dist);
  const auto r = population_risk_mc(Predictor::from_weights(dist.space, dist.true_weights), dist,
                                    spec, 1000, 2);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.stderr_, 0.0);
}

TEST(MonteCarloRisk, SeedDeterminismAndPreconditions) {
  const auto dist = unit_interval_target(0.3);
  const auto spec = certified(LossFamily::logistic, 0.0, dist);
  const auto f = Predictor::from_weights(dist.space, Eigen::VectorXd::Constant(1, 0.4));
  const auto a = population_risk_mc(f, dist, spec, 10'000, 5);
  const auto b = population_risk_mc(f, dist, spec, 10'000, 5);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_THROW(population_risk_mc(f, dist, spec, 1, 5), std::invalid_argument);
  const auto other = FeatureSpace::linear(1, 3.0);
  EXPECT_THROW(population_risk_mc(Predictor::zero(other), dist, spec, 100, 5), std::invalid_argument);
}

TEST(OptimalReferenceTest, SquareWithoutRidgeIsTarget) {
  std::mt19937_64 rng(53);
  const auto space = FeatureSpace::finite_rank(3, 5, 2.0);
  const auto dist = DistributionSpec::make(space, dt::in_ball(rng, 3, 1.0), NoiseLaw::uniform, 0.3);
  const auto ref = optimal_reference(dist, certified(LossFamily::square, 0.0, dist));
  EXPECT_LT((ref.predictor.weights - dist.true_weights).norm(), 1e-15);
  EXPECT_NEAR(ref.risk.value, 0.03, 1e-15);
  EXPECT_EQ(ref.risk.method, RiskMethod::analytic);
}

TEST(OptimalReferenceTest, IdentityCovarianceRidgeHalvesTarget) {
  const auto dist = unit_interval_target(0.2);
  const auto ref = optimal_reference(dist, certified(LossFamily::square, 1.0, dist));
  EXPECT_DOUBLE_EQ(ref.predictor.weights(0), 0.5);
}

TEST(OptimalReferenceTest, RidgeSolutionSolvesNormalEquations) {
  std::mt19937_64 rng(54);
  const auto space = FeatureSpace::eigen_decay(6, 1.0, 2.0);
  const auto dist = DistributionSpec::make(space, dt::in_ball(rng, 6, 1.0), NoiseLaw::uniform, 0.3);
  const auto spec = certified(LossFamily::square, 0.1, dist);
  const auto ref = optimal_reference(dist, spec);
  const Eigen::VectorXd sigma = space.second_moment();
  const Eigen::VectorXd lhs = sigma.cwiseProduct(ref.predictor.weights) + 0.1 * ref.predictor.weights;
  EXPECT_LT((lhs - sigma.cwiseProduct(dist.true_weights)).norm(), 1e-15);
  // Validated against Monte Carlo.
  const auto mc = population_risk_mc(ref.predictor, dist, spec, 100'000, 9);
  EXPECT_LE(std::abs(mc.value - ref.risk.value), 4.0 * mc.stderr_);
  // Any perturbation raises the analytic risk.
  for (int i = 0; i < 20; ++i) {
    const auto g = Predictor::from_weights(space, ref.predictor.weights + dt::in_ball(rng, 6, 0.1));
    EXPECT_GE(population_risk_analytic(g, dist, spec).value, ref.risk.value);
  }
}

TEST(OptimalReferenceTest, LogisticSeparableSitsOnBoundary) {
  const auto space = FeatureSpace::linear(2, 2.0, InputDomain::sphere);
  const Eigen::Vector2d w_star(0.6, 0.8);
  const auto dist = DistributionSpec::make(space, w_star, NoiseLaw::uniform, 0.0, LabelRule::sign);
  const auto spec = certified(LossFamily::logistic, 0.0, dist);
  const auto ref = optimal_reference(dist, spec, {20'000, 20'000, 3});
  EXPECT_NEAR(norm(ref.predictor), 2.0, 1e-9);
  EXPECT_GT(ref.predictor.weights.normalized().dot(w_star), 0.999);
  EXPECT_EQ(ref.risk.method, RiskMethod::monte_carlo);
  EXPECT_GT(ref.risk.stderr_, 0.0);
}

TEST(ExcessRisk, AnalyticExamples) {
  const auto dist = unit_interval_target(0.0);
  const auto spec = certified(LossFamily::square, 0.0, dist);
  const auto ref = optimal_reference(dist, spec);
  EXPECT_DOUBLE_EQ(excess_risk(Predictor::zero(dist.space), dist, spec, ref, 100, 1).value, 1.0);
  const auto zero_gap = excess_risk(ref.predictor, dist, spec, ref, 100, 1);
  EXPECT_EQ(zero_gap.value, 0.0);
  EXPECT_EQ(zero_gap.stderr_, 0.0);
}

TEST(ExcessRisk, MonteCarloAtReferenceIsZero) {
  const auto space = FeatureSpace::linear(2, 2.0, InputDomain::sphere);
  const auto dist =
      DistributionSpec::make(space, Eigen::Vector2d(0.6, 0.8), NoiseLaw::uniform, 0.1, LabelRule::sign);
  const auto spec = certified(LossFamily::logistic, 0.0, dist);
  const auto ref = optimal_reference(dist, spec, {5000, 5000, 1});
  const auto e = excess_risk(ref.predictor, dist, spec, ref, 1000, 2);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.method, RiskMethod::monte_carlo);
}

TEST(ExcessRisk, NonnegativeUpToMonteCarloError) {
  std::mt19937_64 rng(55);
  const auto space = FeatureSpace::linear(2, 2.0, InputDomain::sphere);
  const auto dist =
      DistributionSpec::make(space, Eigen::Vector2d(0.6, 0.8), NoiseLaw::uniform, 0.2, LabelRule::sign);
  for (const auto family : {LossFamily::logistic, LossFamily::squared_hinge}) {
    const auto spec = certified(family, 0.0, dist);
    const auto ref = optimal_reference(dist, spec, {50'000, 50'000, 4});
    for (int i = 0; i < 20; ++i) {
      const auto f = Predictor::from_weights(space, dt::in_ball(rng, 2, 2.0));
      const auto e = excess_risk(f, dist, spec, ref, 20'000, 100 + i);
      EXPECT_GE(e.value, -3.0 * e.stderr_) << to_string(family);
    }
  }
  // Square loss with clipping forces the Monte Carlo path.
  const auto clipped = DistributionSpec::make(space, Eigen::Vector2d(1.2, 0.5), NoiseLaw::uniform, 0.5,
                                              LabelRule::regression, 1.0);
  const auto sq = certified(LossFamily::square, 0.0, clipped);
  const auto ref = optimal_reference(clipped, sq, {50'000, 50'000, 5});
  for (int i = 0; i < 20; ++i) {
    const auto f = Predictor::from_weights(space, dt::in_ball(rng, 2, 2.0));
    const auto e = excess_risk(f, clipped, sq, ref, 20'000, 200 + i);
    EXPECT_EQ(e.method, RiskMethod::monte_carlo);
    EXPECT_GE(e.value, -3.0 * e.stderr_);
  }
}

TEST(ExcessRisk, PairedEstimateMatchesDifferenceOfRisks) {
  const auto space = FeatureSpace::linear(2, 2.0, InputDomain::sphere);
  const auto dist =
      DistributionSpec::make(space, Eigen::Vector2d(0.6, 0.8), NoiseLaw::uniform, 0.2, LabelRule::sign);
  const auto spec = certified(LossFamily::logistic, 0.0, dist);
  const auto ref = optimal_reference(dist, spec, {20'000, 20'000, 6});
  const auto f = Predictor::from_weights(space, Eigen::Vector2d(0.3, -0.2));
  const auto paired = excess_risk(f, dist, spec, ref, 50'000, 77);
  const auto rf = population_risk_mc(f, dist, spec, 50'000, 77);
  const auto rs = population_risk_mc(ref.predictor, dist, spec, 50'000, 77);
  EXPECT_NEAR(paired.value, rf.value - rs.value, 1e-10);
  EXPECT_LE(paired.stderr_, std::hypot(rf.stderr_, rs.stderr_));
}
