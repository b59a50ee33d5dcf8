#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "dcerm/hypothesis.hpp"

namespace dcerm {

/// One labelled example z = (x, y).
struct Example {
  Eigen::VectorXd x;
  double y = 0.0;
};

/// A sample S. Rows of `features` are phi(x_i) for the rows of `inputs`.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  bool empty() const { return labels.size() == 0; }
  Example example(std::size_t i) const { return {inputs.row(i).transpose(), labels(i)}; }

  static Dataset from_inputs(const FeatureSpace& space, Eigen::MatrixXd inputs,
                             Eigen::VectorXd labels);
  /// Builds a dataset directly from feature rows; inputs are set equal to the
  /// features, which is only meaningful for identity feature maps.
  static Dataset from_features(Eigen::MatrixXd features, Eigen::VectorXd labels);

  Dataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace dcerm
