#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "dcerm/dataset.hpp"
#include "dcerm/hypothesis.hpp"
#include "dcerm/losses.hpp"

namespace dcerm::testing {

inline constexpr std::array<LossFamily, 4> kFamilies = {
    LossFamily::square, LossFamily::logistic, LossFamily::squared_hinge,
    LossFamily::squared_epsilon};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, std::size_t d, double lo, double hi) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = uniform(rng, lo, hi);
  return v;
}

// Uniform point in the ball of the given radius.
inline Eigen::VectorXd in_ball(std::mt19937_64& rng, std::size_t d, double radius) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = gauss(rng);
  const double r = radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(d));
  return v * (r / v.norm());
}

inline Eigen::VectorXd on_sphere(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = gauss(rng);
  return v / v.norm();
}

inline Eigen::VectorXd random_input(std::mt19937_64& rng, const FeatureSpace& space) {
  if (space.domain() == InputDomain::sphere) return on_sphere(rng, space.input_dim());
  return uniform_vector(rng, space.input_dim(), -1.0, 1.0);
}

// Label in the family's natural range: +-1 for classification losses.
inline double random_label(std::mt19937_64& rng, LossFamily family, double bound) {
  if (family == LossFamily::logistic || family == LossFamily::squared_hinge)
    return uniform(rng, 0.0, 1.0) < 0.5 ? -bound : bound;
  return uniform(rng, -bound, bound);
}

// Independent scalar loss formulas, written out from the definitions.
inline double reference_loss(LossFamily family, double eps, double p, double y) {
  switch (family) {
    case LossFamily::square:
      return (p - y) * (p - y);
    case LossFamily::logistic:
      return std::log(1.0 + std::exp(-y * p));
    case LossFamily::squared_hinge: {
      const double t = std::max(0.0, 1.0 - y * p);
      return t * t;
    }
    case LossFamily::squared_epsilon: {
      const double t = std::max(0.0, std::abs(p - y) - eps);
      return t * t;
    }
  }
  return 0.0;
}

// Central finite-difference gradient of w -> loss_value_features(spec, w, phi, y).
inline Eigen::VectorXd fd_gradient(const LossSpec& spec, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& phi, double y) {
  const double step = 1e-6 * (1.0 + w.norm());
  Eigen::VectorXd g(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    Eigen::VectorXd hi = w, lo = w;
    hi(k) += step;
    lo(k) -= step;
    g(k) = (loss_value_features(spec, hi, phi, y) - loss_value_features(spec, lo, phi, y)) /
           (2.0 * step);
  }
  return g;
}

inline double fd_relative_error(const Eigen::VectorXd& fd, const Eigen::VectorXd& exact) {
  return (fd - exact).norm() / std::max(1.0, exact.norm());
}

// Random square-loss shard with n rows in dimension d.
inline Dataset random_shard(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = uniform(rng, -1.0, 1.0);
    y(i) = uniform(rng, -1.0, 1.0);
  }
  return Dataset::from_features(std::move(x), std::move(y));
}

}  // namespace dcerm::testing
