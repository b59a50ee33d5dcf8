#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dcerm/hypothesis.hpp"

namespace dcerm {

/// Result of a farthest-point traversal stopped at radius eps.
struct Cover {
  double radius = 0.0;
  /// Row indices of the centers, in the order they were chosen.
  std::vector<std::size_t> centers;
  /// Largest distance from any point to its nearest center (<= radius).
  double covering_radius = 0.0;
  /// Smallest pairwise distance among centers (> radius whenever there are at
  /// least two). The centers therefore form a packing certificate: any
  /// (radius/2)-cover of the sample needs at least centers.size() balls.
  double min_center_separation = 0.0;

  std::size_t size() const { return centers.size(); }
};

/// Greedy farthest-point traversal over the rows of `points`, starting at the
/// row closest to the centroid. Throws std::invalid_argument for an empty set
/// or non-positive eps.
Cover greedy_cover(const Eigen::MatrixXd& points, double eps);

/// Cover sizes for a whole grid from one traversal; entry j equals
/// greedy_cover(points, eps_grid[j]).size().
std::vector<std::size_t> greedy_cover_sizes(const Eigen::MatrixXd& points,
                                            const std::vector<double>& eps_grid);

/// Size of a maximal greedy packing: points pairwise more than `separation`
/// apart, scanned in row order.
std::size_t greedy_packing_size(const Eigen::MatrixXd& points, double separation);

/// Least-squares fit of log C against u = log(1/eps).
struct RegimeFit {
  CoveringRegime regime = CoveringRegime::logarithmic;
  /// Fitted h: the slope for log C = a + h u, or the exponent for
  /// log C = c * exp(u / h).
  double h = 0.0;
  /// Intercept a (logarithmic) or scale c (polynomial).
  double scale = 0.0;
  /// Root mean squared residual in log C.
  double residual = 0.0;
};

RegimeFit fit_logarithmic(const std::vector<double>& eps_grid, const std::vector<double>& log_sizes);
RegimeFit fit_polynomial(const std::vector<double>& eps_grid, const std::vector<double>& log_sizes);

struct CoveringEstimate {
  std::vector<double> eps_grid;
  std::vector<std::size_t> cover_sizes;
  CoveringRegime regime = CoveringRegime::logarithmic;
  double h_hat = 0.0;
  double residual = 0.0;
  RegimeFit logarithmic;
  RegimeFit polynomial;
  std::size_t sample_count = 0;
};

/// Uniform draws from the ball ||w|| <= radius in R^d, embedded by the
/// feature scales so Euclidean distance between rows is the L2(P_X) distance
/// between predictors (up to the domain's constant).
Eigen::MatrixXd sample_predictor_ball(const FeatureSpace& space, double radius, std::size_t count,
                                      std::uint64_t seed);

/// Covers a sample of the predictor ball at each eps and picks the better of
/// the logarithmic and polynomial growth models. Throws std::domain_error
/// when every cover has size 1 (nothing to fit).
CoveringEstimate estimate_regime(const FeatureSpace& space, double radius,
                                 std::vector<double> eps_grid, std::size_t sample_count,
                                 std::uint64_t seed);

}  // namespace dcerm
