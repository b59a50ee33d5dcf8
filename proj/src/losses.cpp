#include "dcerm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dcerm {

std::string_view to_string(LossFamily family) {
  switch (family) {
    case LossFamily::square: return "square";
    case LossFamily::logistic: return "logistic";
    case LossFamily::squared_hinge: return "squared-hinge";
    case LossFamily::squared_epsilon: return "squared-epsilon";
  }
  return "?";
}

LossFamily parse_loss_family(std::string_view text) {
  if (text == "square") return LossFamily::square;
  if (text == "logistic") return LossFamily::logistic;
  if (text == "squared-hinge") return LossFamily::squared_hinge;
  if (text == "squared-epsilon") return LossFamily::squared_epsilon;
  throw std::invalid_argument("unknown loss family: " + std::string(text));
}

double base_loss(const LossSpec& spec, double p, double y) {
  switch (spec.family) {
    case LossFamily::square: {
      const double r = p - y;
      return r * r;
    }
    case LossFamily::logistic: {
      const double t = y * p;
      return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    }
    case LossFamily::squared_hinge: {
      const double a = std::max(0.0, 1.0 - y * p);
      return a * a;
    }
    case LossFamily::squared_epsilon: {
      const double a = std::max(0.0, std::abs(y - p) - spec.epsilon);
      return a * a;
    }
  }
  throw std::invalid_argument("unknown loss family");
}

double base_loss_derivative(const LossSpec& spec, double p, double y) {
  switch (spec.family) {
    case LossFamily::square: return 2.0 * (p - y);
    case LossFamily::logistic: {
      // -y * sigmoid(-y p), written to avoid overflow for large |y p|
      const double t = y * p;
      const double s = t > 0.0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
      return -y * s;
    }
    case LossFamily::squared_hinge: return -2.0 * y * std::max(0.0, 1.0 - y * p);
    case LossFamily::squared_epsilon: {
      const double r = p - y;
      const double a = std::max(0.0, std::abs(r) - spec.epsilon);
      return r > 0.0 ? 2.0 * a : -2.0 * a;
    }
  }
  throw std::invalid_argument("unknown loss family");
}

double loss_value_features(const LossSpec& spec, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& phi, double label) {
  if (phi.size() != weights.size()) throw std::invalid_argument("feature length mismatch");
  return base_loss(spec, weights.dot(phi), label) + spec.ridge * weights.squaredNorm();
}

Eigen::VectorXd loss_grad_features(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& phi, double label) {
  if (phi.size() != weights.size()) throw std::invalid_argument("feature length mismatch");
  return base_loss_derivative(spec, weights.dot(phi), label) * phi + 2.0 * spec.ridge * weights;
}

double loss_value(const LossSpec& spec, const Predictor& f, const Example& z,
                  const FeatureSpace& space) {
  if (f.space_tag != space.tag()) throw std::invalid_argument("predictor belongs to another space");
  return loss_value_features(spec, f.weights, feature_map(space, z.x), z.y);
}

Eigen::VectorXd loss_grad(const LossSpec& spec, const Predictor& f, const Example& z,
                          const FeatureSpace& space) {
  if (f.space_tag != space.tag()) throw std::invalid_argument("predictor belongs to another space");
  return loss_grad_features(spec, f.weights, feature_map(space, z.x), z.y);
}

double empirical_risk_and_gradient(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Dataset& data, Eigen::VectorXd& gradient) {
  if (data.empty()) throw std::invalid_argument("empirical risk of an empty dataset");
  const Eigen::VectorXd pred = data.features * weights;
  Eigen::VectorXd deriv(pred.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    total += base_loss(spec, pred(i), data.labels(i));
    deriv(i) = base_loss_derivative(spec, pred(i), data.labels(i));
  }
  const double n = static_cast<double>(data.size());
  gradient.noalias() = data.features.transpose() * deriv;
  gradient /= n;
  gradient += 2.0 * spec.ridge * weights;
  return total / n + spec.ridge * weights.squaredNorm();
}

double empirical_risk(const LossSpec& spec, const Eigen::VectorXd& weights, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("empirical risk of an empty dataset");
  const Eigen::VectorXd pred = data.features * weights;
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) total += base_loss(spec, pred(i), data.labels(i));
  return total / static_cast<double>(data.size()) + spec.ridge * weights.squaredNorm();
}

Eigen::VectorXd empirical_gradient(const LossSpec& spec, const Eigen::VectorXd& weights,
                                   const Dataset& data) {
  Eigen::VectorXd g;
  empirical_risk_and_gradient(spec, weights, data, g);
  return g;
}

LossSpec certify_constants(LossSpec spec, const LossDomain& domain) {
  const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(domain.radius) || !ok(domain.kappa) || !ok(domain.label_bound))
    throw std::invalid_argument("certification needs finite positive B, kappa and Y");
  if (spec.ridge < 0.0) throw std::invalid_argument("ridge coefficient must be nonnegative");
  if (spec.family == LossFamily::squared_epsilon && spec.epsilon < 0.0)
    throw std::invalid_argument("epsilon must be nonnegative");

  const double B = domain.radius;
  const double kappa = domain.kappa;
  const double Y = domain.label_bound;
  const double P = B * kappa;  // sup |<w, phi(x)>|

  double curvature = 0.0;  // sup |l''(p, y)|
  double slope = 0.0;      // sup |l'(p, y)|
  switch (spec.family) {
    case LossFamily::square:
      curvature = 2.0;
      slope = 2.0 * (P + Y);
      break;
    case LossFamily::logistic:
      curvature = Y * Y / 4.0;
      slope = Y;
      break;
    case LossFamily::squared_hinge:
      curvature = 2.0 * Y * Y;
      slope = 2.0 * Y * (1.0 + Y * P);
      break;
    case LossFamily::squared_epsilon:
      curvature = 2.0;
      slope = 2.0 * std::max(0.0, P + Y - spec.epsilon);
      break;
  }

  spec.smoothness = curvature * kappa * kappa + 2.0 * spec.ridge;
  spec.lipschitz = slope * kappa + 2.0 * spec.ridge * B;
  spec.strong_convexity = 2.0 * spec.ridge;
  spec.domain = domain;
  return spec;
}

}  // namespace dcerm
