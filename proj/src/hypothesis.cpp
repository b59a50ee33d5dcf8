#include "dcerm/hypothesis.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "dcerm/rng.hpp"

namespace dcerm {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::linear: return "linear";
    case SpaceKind::finite_rank_kernel: return "finite-rank-kernel";
    case SpaceKind::eigen_decay: return "eigen-decay";
  }
  return "?";
}

std::string_view to_string(InputDomain domain) {
  return domain == InputDomain::hypercube ? "hypercube" : "sphere";
}

std::string_view to_string(CoveringRegime regime) {
  return regime == CoveringRegime::logarithmic ? "logarithmic" : "polynomial";
}

SpaceKind parse_space_kind(std::string_view text) {
  if (text == "linear") return SpaceKind::linear;
  if (text == "finite-rank-kernel" || text == "finite-rank") return SpaceKind::finite_rank_kernel;
  if (text == "eigen-decay") return SpaceKind::eigen_decay;
  throw std::invalid_argument("unknown space kind: " + std::string(text));
}

InputDomain parse_input_domain(std::string_view text) {
  if (text == "hypercube" || text == "cube") return InputDomain::hypercube;
  if (text == "sphere") return InputDomain::sphere;
  throw std::invalid_argument("unknown input domain: " + std::string(text));
}

namespace {

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace

FeatureSpace::FeatureSpace(SpaceKind kind, InputDomain domain, std::size_t dim,
                           std::size_t input_dim, double decay, double radius)
    : kind_(kind), domain_(domain), dim_(dim), input_dim_(input_dim), decay_(decay),
      radius_(radius) {
  if (dim == 0) throw std::invalid_argument("feature dimension must be >= 1");
  if (input_dim < dim) throw std::invalid_argument("input dimension must be >= feature dimension");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("norm bound B must be positive and finite");
  if (!(decay > 0.0) || !std::isfinite(decay))
    throw std::invalid_argument("decay exponent h must be positive and finite");

  scales_.resize(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k)
    scales_(static_cast<Eigen::Index>(k)) =
        kind == SpaceKind::eigen_decay ? std::pow(static_cast<double>(k + 1), -decay) : 1.0;

  // Hypercube: every |x_k| <= 1 simultaneously. Sphere: ||x|| = 1, so the sup
  // of ||s . x|| is the largest scale.
  kappa_ = domain == InputDomain::hypercube ? scales_.norm() : scales_.maxCoeff();

  tag_ = derive_seed(static_cast<std::uint64_t>(kind),
                     {static_cast<std::uint64_t>(domain), dim, input_dim, bits_of(decay),
                      bits_of(radius)});
}

FeatureSpace FeatureSpace::linear(std::size_t dim, double radius, InputDomain domain) {
  return {SpaceKind::linear, domain, dim, dim, static_cast<double>(dim), radius};
}

FeatureSpace FeatureSpace::finite_rank(std::size_t dim, std::size_t input_dim, double radius,
                                       InputDomain domain) {
  return {SpaceKind::finite_rank_kernel, domain, dim, input_dim, static_cast<double>(dim), radius};
}

FeatureSpace FeatureSpace::eigen_decay(std::size_t dim, double decay, double radius,
                                       InputDomain domain) {
  return {SpaceKind::eigen_decay, domain, dim, dim, decay, radius};
}

double FeatureSpace::covering_parameter() const {
  return kind_ == SpaceKind::eigen_decay ? decay_ : static_cast<double>(dim_);
}

CoveringRegime FeatureSpace::covering_regime() const {
  return kind_ == SpaceKind::eigen_decay ? CoveringRegime::polynomial
                                         : CoveringRegime::logarithmic;
}

Eigen::VectorXd FeatureSpace::second_moment() const {
  // E[x_k^2] is 1/3 on [-1,1]^p and 1/p on S^{p-1}; coordinates are uncorrelated.
  const double base = domain_ == InputDomain::hypercube ? 1.0 / 3.0
                                                        : 1.0 / static_cast<double>(input_dim_);
  return base * scales_.array().square().matrix();
}

double FeatureSpace::max_abs_prediction(const Eigen::VectorXd& weights) const {
  if (static_cast<std::size_t>(weights.size()) != dim_)
    throw std::invalid_argument("weight length does not match space dimension");
  const Eigen::ArrayXd v = weights.array() * scales_.array();
  return domain_ == InputDomain::hypercube ? v.abs().sum() : v.matrix().norm();
}

std::string FeatureSpace::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(d=" << dim_;
  if (kind_ == SpaceKind::finite_rank_kernel) os << ", p=" << input_dim_;
  if (kind_ == SpaceKind::eigen_decay) os << ", h=" << decay_;
  os << ", B=" << radius_ << ", kappa=" << kappa_ << ", " << to_string(domain_) << ")";
  return os.str();
}

double eigen_tail_fraction(double decay, std::size_t dim) {
  if (!(decay > 0.5)) throw std::invalid_argument("eigenvalue mass is infinite for h <= 1/2");
  // Head summed exactly; tail by the Euler-Maclaurin estimate of
  // sum_{k>K} k^{-s} with K large.
  const double s = 2.0 * decay;
  constexpr std::size_t K = 1'000'000;
  auto tail_from = [s](double start) {
    // sum_{k >= start} k^{-s} ~ start^{1-s}/(s-1) + start^{-s}/2 + s start^{-s-1}/12
    return std::pow(start, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(start, -s) +
           s * std::pow(start, -s - 1.0) / 12.0;
  };
  double head = 0.0;
  double mid = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    const double term = std::pow(static_cast<double>(k), -s);
    (k <= dim ? head : mid) += term;
  }
  const double total = head + mid + tail_from(static_cast<double>(K));
  return (total - head) / total;
}

Predictor Predictor::zero(const FeatureSpace& space) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim())), space.tag()};
}

Predictor Predictor::from_weights(const FeatureSpace& space, Eigen::VectorXd weights) {
  if (static_cast<std::size_t>(weights.size()) != space.dim())
    throw std::invalid_argument("weight length does not match space dimension");
  return {std::move(weights), space.tag()};
}

Eigen::VectorXd feature_map(const FeatureSpace& space, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != space.input_dim())
    throw std::invalid_argument("input dimension mismatch");
  return x.head(static_cast<Eigen::Index>(space.dim())).cwiseProduct(space.scales());
}

Eigen::MatrixXd feature_map_rows(const FeatureSpace& space, const Eigen::MatrixXd& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != space.input_dim())
    throw std::invalid_argument("input dimension mismatch");
  return inputs.leftCols(static_cast<Eigen::Index>(space.dim())) * space.scales().asDiagonal();
}

double predict(const Predictor& f, const Eigen::VectorXd& x, const FeatureSpace& space) {
  if (f.space_tag != space.tag()) throw std::invalid_argument("predictor belongs to another space");
  return f.weights.dot(feature_map(space, x));
}

double predict_features(const Predictor& f, const Eigen::VectorXd& phi) {
  if (phi.size() != f.weights.size()) throw std::invalid_argument("feature length mismatch");
  return f.weights.dot(phi);
}

double norm(const Predictor& f) { return f.weights.norm(); }

double distance(const Predictor& f, const Predictor& g) {
  if (f.space_tag != g.space_tag) throw std::invalid_argument("predictors from different spaces");
  return (f.weights - g.weights).norm();
}

void project_to_ball_inplace(Eigen::VectorXd& weights, double radius) {
  const double n = weights.norm();
  if (!(n > radius)) return;
  weights *= radius / n;
  // Shrink past any rounding overshoot.
  while (weights.norm() > radius) weights *= 1.0 - 0x1p-52;
}

Predictor project_to_ball(const Predictor& f, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  Predictor out = f;
  project_to_ball_inplace(out.weights, radius);
  return out;
}

}  // namespace dcerm
