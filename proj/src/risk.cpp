#include "dcerm/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dcerm/rng.hpp"
#include "dcerm/solver.hpp"

namespace dcerm {

std::string_view to_string(NoiseLaw law) { return law == NoiseLaw::uniform ? "uniform" : "rademacher"; }
std::string_view to_string(LabelRule rule) { return rule == LabelRule::regression ? "regression" : "sign"; }
std::string_view to_string(RiskMethod method) {
  return method == RiskMethod::analytic ? "analytic" : "monte-carlo";
}

NoiseLaw parse_noise_law(std::string_view text) {
  if (text == "uniform") return NoiseLaw::uniform;
  if (text == "rademacher") return NoiseLaw::rademacher;
  throw std::invalid_argument("unknown noise law: " + std::string(text));
}

LabelRule parse_label_rule(std::string_view text) {
  if (text == "regression") return LabelRule::regression;
  if (text == "sign") return LabelRule::sign;
  throw std::invalid_argument("unknown label rule: " + std::string(text));
}

DistributionSpec DistributionSpec::make(FeatureSpace space, Eigen::VectorXd true_weights,
                                        NoiseLaw noise, double sigma, LabelRule labels,
                                        double label_bound) {
  if (static_cast<std::size_t>(true_weights.size()) != space.dim())
    throw std::invalid_argument("true weights do not match space dimension");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
  if (true_weights.norm() > space.radius() * (1.0 + 1e-12))
    throw std::invalid_argument("true weights must lie in the norm ball");
  if (label_bound <= 0.0) {
    label_bound = labels == LabelRule::sign ? 1.0 : space.max_abs_prediction(true_weights) + sigma;
    // A degenerate zero target with no noise still needs a positive bound.
    if (label_bound <= 0.0) label_bound = 1.0;
  }
  return {std::move(space), std::move(true_weights), noise, sigma, labels, label_bound};
}

double DistributionSpec::noise_second_moment() const {
  return noise == NoiseLaw::uniform ? sigma * sigma / 3.0 : sigma * sigma;
}

bool DistributionSpec::clipping_possible() const {
  if (labels == LabelRule::sign) return false;
  return space.max_abs_prediction(true_weights) + sigma > label_bound;
}

namespace {

void draw_input(const FeatureSpace& space, Rng& rng,
                Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> x) {
  const auto p = x.size();
  if (space.domain() == InputDomain::hypercube) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index k = 0; k < p; ++k) x(k) = u(rng);
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    double n2 = 0.0;
    do {
      for (Eigen::Index k = 0; k < p; ++k) x(k) = g(rng);
      n2 = x.squaredNorm();
    } while (n2 == 0.0);
    x /= std::sqrt(n2);
  }
}

double draw_noise(const DistributionSpec& dist, Rng& rng) {
  if (dist.sigma == 0.0) return 0.0;
  if (dist.noise == NoiseLaw::uniform)
    return std::uniform_real_distribution<double>(-dist.sigma, dist.sigma)(rng);
  return (rng() >> 63) ? dist.sigma : -dist.sigma;
}

double make_label(const DistributionSpec& dist, double signal, double noise) {
  const double v = signal + noise;
  if (dist.labels == LabelRule::sign) return v >= 0.0 ? 1.0 : -1.0;
  return std::clamp(v, -dist.label_bound, dist.label_bound);
}

/// Fills rows [0, n) of a block of fresh draws.
void draw_block(const DistributionSpec& dist, Rng& rng, Eigen::MatrixXd& inputs,
                Eigen::VectorXd& labels) {
  const Eigen::VectorXd target = dist.true_weights.cwiseProduct(dist.space.scales());
  const auto d = static_cast<Eigen::Index>(dist.space.dim());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    draw_input(dist.space, rng, inputs.row(i));
    const double signal = inputs.row(i).head(d).dot(target);
    labels(i) = make_label(dist, signal, draw_noise(dist, rng));
  }
}

// Streams M draws in fixed-size blocks through `visit(features, labels)`.
template <class Visit>
void stream_draws(const DistributionSpec& dist, std::size_t samples, std::uint64_t seed,
                  Visit&& visit) {
  constexpr std::size_t kBlock = 8192;
  Rng rng(seed);
  const auto p = static_cast<Eigen::Index>(dist.space.input_dim());
  Eigen::MatrixXd inputs;
  Eigen::VectorXd labels;
  for (std::size_t done = 0; done < samples;) {
    const auto n = static_cast<Eigen::Index>(std::min(kBlock, samples - done));
    inputs.resize(n, p);
    labels.resize(n);
    draw_block(dist, rng, inputs, labels);
    visit(feature_map_rows(dist.space, inputs), labels);
    done += static_cast<std::size_t>(n);
  }
}

struct MeanAccumulator {
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
    ++n;
  }
  RiskEstimate finish() const {
    const long double mean = sum / static_cast<long double>(n);
    long double var = (sum_sq - static_cast<long double>(n) * mean * mean) /
                      static_cast<long double>(n - 1);
    if (var < 0.0L) var = 0.0L;
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)),
            RiskMethod::monte_carlo, n};
  }
};

void check_predictor(const Predictor& f, const DistributionSpec& dist) {
  if (f.space_tag != dist.space.tag())
    throw std::invalid_argument("predictor belongs to another space");
}

}  // namespace

Dataset sample_dataset(const DistributionSpec& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(dist.space.input_dim()));
  Eigen::VectorXd labels(static_cast<Eigen::Index>(n));
  draw_block(dist, rng, inputs, labels);
  return Dataset::from_inputs(dist.space, std::move(inputs), std::move(labels));
}

bool analytic_risk_available(const DistributionSpec& dist, const LossSpec& spec) {
  return spec.family == LossFamily::square && dist.labels == LabelRule::regression &&
         !dist.clipping_possible();
}

RiskEstimate population_risk_analytic(const Predictor& f, const DistributionSpec& dist,
                                      const LossSpec& spec) {
  check_predictor(f, dist);
  if (!analytic_risk_available(dist, spec))
    throw std::domain_error("closed-form risk needs square loss, regression labels, no clipping");
  const Eigen::VectorXd diff = f.weights - dist.true_weights;
  const double value = diff.dot(dist.space.second_moment().cwiseProduct(diff)) +
                       dist.noise_second_moment() + spec.ridge * f.weights.squaredNorm();
  return {value, 0.0, RiskMethod::analytic, 0};
}

RiskEstimate population_risk_mc(const Predictor& f, const DistributionSpec& dist,
                                const LossSpec& spec, std::size_t samples, std::uint64_t seed) {
  check_predictor(f, dist);
  if (samples < 2) throw std::invalid_argument("Monte Carlo risk needs M >= 2");
  MeanAccumulator acc;
  const double ridge_term = spec.ridge * f.weights.squaredNorm();
  stream_draws(dist, samples, seed, [&](const Eigen::MatrixXd& phi, const Eigen::VectorXd& y) {
    const Eigen::VectorXd pred = phi * f.weights;
    for (Eigen::Index i = 0; i < pred.size(); ++i) acc.add(base_loss(spec, pred(i), y(i)) + ridge_term);
  });
  return acc.finish();
}

RiskEstimate population_risk(const Predictor& f, const DistributionSpec& dist,
                             const LossSpec& spec, std::size_t samples, std::uint64_t seed) {
  return analytic_risk_available(dist, spec) ? population_risk_analytic(f, dist, spec)
                                             : population_risk_mc(f, dist, spec, samples, seed);
}

OptimalReference optimal_reference(const DistributionSpec& dist, const LossSpec& spec,
                                   const ReferenceOptions& options) {
  if (analytic_risk_available(dist, spec)) {
    const Eigen::VectorXd sigma = dist.space.second_moment();
    const Eigen::VectorXd w =
        (sigma.array() * dist.true_weights.array() / (sigma.array() + spec.ridge)).matrix();
    Predictor f = Predictor::from_weights(dist.space, w);
    RiskEstimate r = population_risk_analytic(f, dist, spec);
    return {std::move(f), r, 0.0};
  }

  const Dataset reference =
      sample_dataset(dist, options.reference_samples,
                     derive_seed(options.seed, {stream::reference, 0}));
  LossSpec certified = spec.certified() ? spec : certify_constants(spec, dist.loss_domain());
  SolveReport solved = solve_erm(reference, certified, dist.space);
  RiskEstimate r = population_risk_mc(solved.predictor, dist, spec, options.mc_samples,
                                      derive_seed(options.seed, {stream::reference, 1}));
  return {std::move(solved.predictor), r, solved.residual};
}

RiskEstimate excess_risk(const Predictor& f, const DistributionSpec& dist, const LossSpec& spec,
                         const OptimalReference& reference, std::size_t samples,
                         std::uint64_t seed) {
  check_predictor(f, dist);
  if (analytic_risk_available(dist, spec) && reference.risk.method == RiskMethod::analytic) {
    const RiskEstimate r = population_risk_analytic(f, dist, spec);
    return {r.value - reference.risk.value, 0.0, RiskMethod::analytic, 0};
  }
  if (samples < 2) throw std::invalid_argument("Monte Carlo risk needs M >= 2");
  MeanAccumulator acc;
  const double ridge_gap =
      spec.ridge * (f.weights.squaredNorm() - reference.predictor.weights.squaredNorm());
  stream_draws(dist, samples, seed, [&](const Eigen::MatrixXd& phi, const Eigen::VectorXd& y) {
    const Eigen::VectorXd pf = phi * f.weights;
    const Eigen::VectorXd ps = phi * reference.predictor.weights;
    for (Eigen::Index i = 0; i < pf.size(); ++i)
      acc.add(base_loss(spec, pf(i), y(i)) - base_loss(spec, ps(i), y(i)) + ridge_gap);
  });
  return acc.finish();
}

}  // namespace dcerm
