#include "dcerm/dataset.hpp"

#include <stdexcept>

namespace dcerm {

Dataset Dataset::from_inputs(const FeatureSpace& space, Eigen::MatrixXd inputs,
                             Eigen::VectorXd labels) {
  if (inputs.rows() != labels.size()) throw std::invalid_argument("inputs/labels row mismatch");
  Dataset d;
  d.features = feature_map_rows(space, inputs);
  d.inputs = std::move(inputs);
  d.labels = std::move(labels);
  return d;
}

Dataset Dataset::from_features(Eigen::MatrixXd features, Eigen::VectorXd labels) {
  if (features.rows() != labels.size()) throw std::invalid_argument("features/labels row mismatch");
  Dataset d;
  d.inputs = features;
  d.features = std::move(features);
  d.labels = std::move(labels);
  return d;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.inputs.resize(n, inputs.cols());
  out.features.resize(n, features.cols());
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    if (r >= labels.size()) throw std::out_of_range("row index out of range");
    out.inputs.row(i) = inputs.row(r);
    out.features.row(i) = features.row(r);
    out.labels(i) = labels(r);
  }
  return out;
}

}  // namespace dcerm
