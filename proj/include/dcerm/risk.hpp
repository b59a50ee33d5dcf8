#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "dcerm/dataset.hpp"
#include "dcerm/hypothesis.hpp"
#include "dcerm/losses.hpp"

namespace dcerm {

enum class NoiseLaw { uniform, rademacher };
enum class LabelRule { regression, sign };
enum class RiskMethod { analytic, monte_carlo };

std::string_view to_string(NoiseLaw law);
std::string_view to_string(LabelRule rule);
std::string_view to_string(RiskMethod method);
NoiseLaw parse_noise_law(std::string_view text);
LabelRule parse_label_rule(std::string_view text);

/// Synthetic law on Z = X x Y with a known target w*.
///
/// x is uniform on the space's input domain, the signal is <w*, phi(x)> and
/// the noise is uniform on [-sigma, sigma] or sigma * Rademacher.
///   regression: y = clip(signal + noise, -Y, Y)
///   sign:       y = +1 if signal + noise >= 0, else -1
struct DistributionSpec {
  FeatureSpace space;
  Eigen::VectorXd true_weights;
  NoiseLaw noise = NoiseLaw::uniform;
  double sigma = 0.0;
  LabelRule labels = LabelRule::regression;
  double label_bound = 1.0;

  /// Validates the parameters. A non-positive label_bound selects the
  /// smallest bound that never clips (sup|signal| + sigma) for regression
  /// labels, and 1 for sign labels.
  static DistributionSpec make(FeatureSpace space, Eigen::VectorXd true_weights, NoiseLaw noise,
                               double sigma, LabelRule labels = LabelRule::regression,
                               double label_bound = 0.0);

  double noise_second_moment() const;
  /// True when some (x, noise) in the support gets clipped.
  bool clipping_possible() const;
  LossDomain loss_domain() const { return {space.radius(), space.kappa(), label_bound}; }
};

struct RiskEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  RiskMethod method = RiskMethod::analytic;
  std::size_t samples = 0;
};

/// N i.i.d. draws. Throws std::invalid_argument for N = 0.
Dataset sample_dataset(const DistributionSpec& dist, std::size_t n, std::uint64_t seed);

/// Closed form (w - w*)^T Sigma_phi (w - w*) + E[noise^2] + ridge ||w||^2.
/// Only for square loss with regression labels and no clipping; otherwise
/// throws std::domain_error and the caller must use the Monte Carlo oracle.
RiskEstimate population_risk_analytic(const Predictor& f, const DistributionSpec& dist,
                                      const LossSpec& spec);
bool analytic_risk_available(const DistributionSpec& dist, const LossSpec& spec);

/// Sample mean of l(f, z) over M fresh draws; stderr = sd / sqrt(M).
RiskEstimate population_risk_mc(const Predictor& f, const DistributionSpec& dist,
                                const LossSpec& spec, std::size_t samples, std::uint64_t seed);

/// Picks the analytic oracle when available, Monte Carlo otherwise.
RiskEstimate population_risk(const Predictor& f, const DistributionSpec& dist,
                             const LossSpec& spec, std::size_t samples, std::uint64_t seed);

struct ReferenceOptions {
  std::size_t reference_samples = 1'000'000;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct OptimalReference {
  Predictor predictor;
  RiskEstimate risk;
  /// Optimality residual of the reference ERM (0 for the analytic route).
  double residual = 0.0;
};

/// f* and R*. Square loss with an analytic oracle solves
/// (Sigma_phi + ridge I) w = Sigma_phi w* directly; every other case runs
/// solve_erm on an independent sample of reference_samples draws and
/// estimates R* by Monte Carlo.
OptimalReference optimal_reference(const DistributionSpec& dist, const LossSpec& spec,
                                   const ReferenceOptions& options = {});

/// R(f) - R*. Analytic when available (stderr 0). Otherwise the Monte Carlo
/// mean of l(f, z) - l(f*, z) over common draws, whose stderr is the sd of
/// the paired differences over sqrt(M).
RiskEstimate excess_risk(const Predictor& f, const DistributionSpec& dist, const LossSpec& spec,
                         const OptimalReference& reference, std::size_t samples,
                         std::uint64_t seed);

}  // namespace dcerm
