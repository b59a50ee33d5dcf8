#include "dcerm/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "dcerm/rng.hpp"

namespace dcerm {

namespace {

/// Farthest-point traversal. Calls on_center(k, r_k) after the k-th center
/// is placed, where r_k is the covering radius of the first k centers;
/// stops once on_center returns false or every point is a center.
template <class OnCenter>
std::vector<std::size_t> traverse(const Eigen::MatrixXd& points, OnCenter&& on_center) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::invalid_argument("empty point set");

  const Eigen::RowVectorXd centroid = points.colwise().mean();
  Eigen::Index first = 0;
  (points.rowwise() - centroid).rowwise().squaredNorm().minCoeff(&first);

  std::vector<std::size_t> centers;
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::Index next = first;
  for (;;) {
    centers.push_back(static_cast<std::size_t>(next));
    nearest = nearest.cwiseMin((points.rowwise() - points.row(next)).rowwise().squaredNorm());
    const double r = std::sqrt(nearest.maxCoeff(&next));
    if (!on_center(centers.size(), r) || r == 0.0) break;
  }
  return centers;
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
}

}  // namespace

Cover greedy_cover(const Eigen::MatrixXd& points, double eps) {
  check_eps(eps);
  Cover cover;
  cover.radius = eps;
  cover.centers = traverse(points, [&](std::size_t, double r) {
    cover.covering_radius = r;
    return r > eps;
  });

  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cover.centers.size(); ++i)
    for (std::size_t j = i + 1; j < cover.centers.size(); ++j)
      sep = std::min(sep, (points.row(static_cast<Eigen::Index>(cover.centers[i])) -
                           points.row(static_cast<Eigen::Index>(cover.centers[j])))
                              .norm());
  cover.min_center_separation = cover.centers.size() > 1 ? sep : 0.0;
  return cover;
}

std::vector<std::size_t> greedy_cover_sizes(const Eigen::MatrixXd& points,
                                            const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) return {};
  for (double e : eps_grid) check_eps(e);
  const double smallest = *std::min_element(eps_grid.begin(), eps_grid.end());
  std::vector<double> radii;  // radii[k-1] = covering radius with k centers
  traverse(points, [&](std::size_t, double r) {
    radii.push_back(r);
    return r > smallest;
  });
  std::vector<std::size_t> sizes;
  sizes.reserve(eps_grid.size());
  for (double e : eps_grid) {
    // Radii are non-increasing; the first k with r_k <= eps is the cover size.
    const auto it = std::find_if(radii.begin(), radii.end(), [e](double r) { return r <= e; });
    sizes.push_back(static_cast<std::size_t>(it - radii.begin()) + 1);
  }
  return sizes;
}

std::size_t greedy_packing_size(const Eigen::MatrixXd& points, double separation) {
  if (points.rows() == 0) throw std::invalid_argument("empty point set");
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool far = true;
    for (Eigen::Index c : chosen)
      if ((points.row(i) - points.row(c)).norm() <= separation) {
        far = false;
        break;
      }
    if (far) chosen.push_back(i);
  }
  return chosen.size();
}

namespace {

double rms(const std::vector<double>& y, const std::vector<double>& fit) {
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) s += (y[j] - fit[j]) * (y[j] - fit[j]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

std::vector<double> log_inverse(const std::vector<double>& eps_grid) {
  std::vector<double> u;
  u.reserve(eps_grid.size());
  for (double e : eps_grid) u.push_back(std::log(1.0 / e));
  return u;
}

/// Best scale and residual of y ~ c * exp(u / h) for a fixed h.
std::pair<double, double> poly_at(const std::vector<double>& u, const std::vector<double>& y,
                                  double h) {
  double num = 0.0;
  double den = 0.0;
  std::vector<double> e(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    e[j] = std::exp(u[j] / h);
    num += y[j] * e[j];
    den += e[j] * e[j];
  }
  const double c = num / den;
  for (auto& v : e) v *= c;
  return {c, rms(y, e)};
}

}  // namespace

RegimeFit fit_logarithmic(const std::vector<double>& eps_grid, const std::vector<double>& log_sizes) {
  if (eps_grid.size() != log_sizes.size() || eps_grid.size() < 2)
    throw std::invalid_argument("need at least two (eps, size) points");
  const auto u = log_inverse(eps_grid);
  const double n = static_cast<double>(u.size());
  double su = 0.0, sy = 0.0, suu = 0.0, suy = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    su += u[j];
    sy += log_sizes[j];
    suu += u[j] * u[j];
    suy += u[j] * log_sizes[j];
  }
  const double den = n * suu - su * su;
  if (den == 0.0) throw std::invalid_argument("eps grid needs two distinct values");
  RegimeFit fit;
  fit.regime = CoveringRegime::logarithmic;
  fit.h = (n * suy - su * sy) / den;
  fit.scale = (sy - fit.h * su) / n;
  std::vector<double> pred(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) pred[j] = fit.scale + fit.h * u[j];
  fit.residual = rms(log_sizes, pred);
  return fit;
}

RegimeFit fit_polynomial(const std::vector<double>& eps_grid, const std::vector<double>& log_sizes) {
  if (eps_grid.size() != log_sizes.size() || eps_grid.size() < 2)
    throw std::invalid_argument("need at least two (eps, size) points");
  const auto u = log_inverse(eps_grid);

  // Coarse scan over log h, then golden-section refinement around the best.
  constexpr double lo = -4.0, hi = 6.0;  // h in [e^-4, e^6]
  constexpr int steps = 400;
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double t = lo + (hi - lo) * i / steps;
    const double res = poly_at(u, log_sizes, std::exp(t)).second;
    if (res < best_res) {
      best_res = res;
      best = i;
    }
  }
  const double step = (hi - lo) / steps;
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(steps, best + 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a);
    const double d = a + g * (b - a);
    if (poly_at(u, log_sizes, std::exp(c)).second < poly_at(u, log_sizes, std::exp(d)).second)
      b = d;
    else
      a = c;
  }
  RegimeFit fit;
  fit.regime = CoveringRegime::polynomial;
  fit.h = std::exp(0.5 * (a + b));
  std::tie(fit.scale, fit.residual) = poly_at(u, log_sizes, fit.h);
  return fit;
}

Eigen::MatrixXd sample_predictor_ball(const FeatureSpace& space, double radius, std::size_t count,
                                      std::uint64_t seed) {
  if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
  const auto d = static_cast<Eigen::Index>(space.dim());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), d);
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double n2 = 0.0;
    do {
      for (Eigen::Index k = 0; k < d; ++k) out(i, k) = g(rng);
      n2 = out.row(i).squaredNorm();
    } while (n2 == 0.0);
    const double r = radius * std::pow(u(rng), 1.0 / static_cast<double>(d));
    out.row(i) *= r / std::sqrt(n2);
  }
  return out * space.scales().asDiagonal();
}

CoveringEstimate estimate_regime(const FeatureSpace& space, double radius,
                                 std::vector<double> eps_grid, std::size_t sample_count,
                                 std::uint64_t seed) {
  if (eps_grid.size() < 2) throw std::invalid_argument("need at least two eps values");
  for (double e : eps_grid)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps values must lie in (0, 1)");
  if (sample_count == 0) throw std::invalid_argument("sample_count must be positive");

  CoveringEstimate est;
  est.sample_count = sample_count;
  est.eps_grid = std::move(eps_grid);
  const Eigen::MatrixXd points = sample_predictor_ball(space, radius, sample_count, seed);
  est.cover_sizes = greedy_cover_sizes(points, est.eps_grid);
  if (std::all_of(est.cover_sizes.begin(), est.cover_sizes.end(), [](std::size_t s) { return s == 1; }))
    throw std::domain_error("degenerate covering fit: every cover has a single center");

  std::vector<double> log_sizes;
  for (std::size_t s : est.cover_sizes) log_sizes.push_back(std::log(static_cast<double>(s)));
  est.logarithmic = fit_logarithmic(est.eps_grid, log_sizes);
  est.polynomial = fit_polynomial(est.eps_grid, log_sizes);
  const RegimeFit& best = est.polynomial.residual < est.logarithmic.residual ? est.polynomial
                                                                             : est.logarithmic;
  est.regime = best.regime;
  est.h_hat = best.h;
  est.residual = best.residual;
  return est;
}

}  // namespace dcerm
