#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dcerm {

enum class SpaceKind { linear, finite_rank_kernel, eigen_decay };
enum class InputDomain { hypercube, sphere };
enum class CoveringRegime { logarithmic, polynomial };

std::string_view to_string(SpaceKind kind);
std::string_view to_string(InputDomain domain);
std::string_view to_string(CoveringRegime regime);
SpaceKind parse_space_kind(std::string_view text);
InputDomain parse_input_domain(std::string_view text);

/// Explicit finite-dimensional realization of a hypothesis class.
///
/// Inputs live in R^p (the hypercube [-1,1]^p or the unit sphere S^{p-1}).
/// Every kind maps x linearly to d features, phi_k(x) = s_k * x_k:
///   - linear:             p = d, s_k = 1
///   - finite-rank-kernel: p >= d, s_k = 1; the kernel sum_{k<=d} x_k x'_k
///                         has rank d on R^p
///   - eigen-decay:        p = d, s_k = k^{-h}; kernel eigenvalues k^{-2h}
/// Predictors are weight vectors w with f(x) = <w, phi(x)> and ||f||_H = ||w||.
class FeatureSpace {
 public:
  static FeatureSpace linear(std::size_t dim, double radius,
                             InputDomain domain = InputDomain::hypercube);
  static FeatureSpace finite_rank(std::size_t dim, std::size_t input_dim, double radius,
                                  InputDomain domain = InputDomain::hypercube);
  static FeatureSpace eigen_decay(std::size_t dim, double decay, double radius,
                                  InputDomain domain = InputDomain::hypercube);

  SpaceKind kind() const { return kind_; }
  InputDomain domain() const { return domain_; }
  std::size_t dim() const { return dim_; }
  std::size_t input_dim() const { return input_dim_; }
  double decay() const { return decay_; }
  double radius() const { return radius_; }
  /// sup_x ||phi(x)|| over the input domain.
  double kappa() const { return kappa_; }
  /// Covering parameter h: d for linear and finite-rank kinds, the decay
  /// exponent for eigen-decay.
  double covering_parameter() const;
  CoveringRegime covering_regime() const;

  /// Per-coordinate feature scale s_k.
  const Eigen::VectorXd& scales() const { return scales_; }
  /// Diagonal of E[phi(x) phi(x)^T] under the uniform law on the domain.
  Eigen::VectorXd second_moment() const;
  /// sup_x |<w, phi(x)>| over the input domain.
  double max_abs_prediction(const Eigen::VectorXd& weights) const;

  /// Fingerprint of all defining parameters; predictors carry it.
  std::uint64_t tag() const { return tag_; }
  std::string describe() const;

 private:
  FeatureSpace(SpaceKind kind, InputDomain domain, std::size_t dim, std::size_t input_dim,
               double decay, double radius);

  SpaceKind kind_;
  InputDomain domain_;
  std::size_t dim_;
  std::size_t input_dim_;
  double decay_;
  double radius_;
  double kappa_;
  Eigen::VectorXd scales_;
  std::uint64_t tag_;
};

/// Fraction of total eigenvalue mass sum_k k^{-2h} lying beyond index d.
double eigen_tail_fraction(double decay, std::size_t dim);

struct Predictor {
  Eigen::VectorXd weights;
  std::uint64_t space_tag = 0;

  static Predictor zero(const FeatureSpace& space);
  static Predictor from_weights(const FeatureSpace& space, Eigen::VectorXd weights);
};

Eigen::VectorXd feature_map(const FeatureSpace& space, const Eigen::VectorXd& x);
/// Row-wise feature map of an (n x p) input matrix.
Eigen::MatrixXd feature_map_rows(const FeatureSpace& space, const Eigen::MatrixXd& inputs);

double predict(const Predictor& f, const Eigen::VectorXd& x, const FeatureSpace& space);
double predict_features(const Predictor& f, const Eigen::VectorXd& phi);

double norm(const Predictor& f);
double distance(const Predictor& f, const Predictor& g);
Predictor project_to_ball(const Predictor& f, double radius);
void project_to_ball_inplace(Eigen::VectorXd& weights, double radius);

}  // namespace dcerm
