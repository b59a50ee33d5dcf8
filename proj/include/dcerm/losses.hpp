#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "dcerm/dataset.hpp"
#include "dcerm/hypothesis.hpp"

namespace dcerm {

enum class LossFamily { square, logistic, squared_hinge, squared_epsilon };

std::string_view to_string(LossFamily family);
LossFamily parse_loss_family(std::string_view text);

/// Bounded domain on which certified constants hold: ||w|| <= B,
/// ||phi(x)|| <= kappa, |y| <= Y.
struct LossDomain {
  double radius = 0.0;
  double kappa = 0.0;
  double label_bound = 0.0;
};

/// A loss family plus optional ridge augmentation ridge * ||w||^2.
///
/// smoothness (G), lipschitz (L) and strong_convexity (eta) are filled by
/// certify_constants and are valid on `domain`.
struct LossSpec {
  LossFamily family = LossFamily::square;
  double epsilon = 0.1;
  double ridge = 0.0;
  std::optional<double> smoothness;
  std::optional<double> lipschitz;
  std::optional<double> strong_convexity;
  std::optional<LossDomain> domain;

  bool certified() const { return smoothness && lipschitz && strong_convexity; }
};

// Scalar loss in the prediction p for label y, without the ridge term.
double base_loss(const LossSpec& spec, double prediction, double label);
// d/dp of base_loss.
double base_loss_derivative(const LossSpec& spec, double prediction, double label);

double loss_value(const LossSpec& spec, const Predictor& f, const Example& z,
                  const FeatureSpace& space);
Eigen::VectorXd loss_grad(const LossSpec& spec, const Predictor& f, const Example& z,
                          const FeatureSpace& space);

// Feature-level forms used by the solver and risk oracles.
double loss_value_features(const LossSpec& spec, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& phi, double label);
Eigen::VectorXd loss_grad_features(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& phi, double label);

/// Mean loss over the dataset (ridge included).
double empirical_risk(const LossSpec& spec, const Eigen::VectorXd& weights, const Dataset& data);
/// Gradient of empirical_risk.
Eigen::VectorXd empirical_gradient(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Dataset& data);
/// Both at once; the predictions are shared.
double empirical_risk_and_gradient(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Dataset& data, Eigen::VectorXd& gradient);

/// Fills G, L and eta with closed-form bounds valid on `domain`:
///   G   = sup|l''| * kappa^2 + 2 ridge
///   L   = sup|l'| * kappa + 2 ridge * B
///   eta = 2 ridge
/// where the sups range over |p| <= B kappa and |y| <= Y. Intrinsic curvature
/// is never credited toward eta. Throws std::invalid_argument on a
/// non-finite or non-positive domain.
LossSpec certify_constants(LossSpec spec, const LossDomain& domain);

}  // namespace dcerm
