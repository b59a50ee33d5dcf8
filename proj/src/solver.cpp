#include "dcerm/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace dcerm {

double default_tolerance(double initial_risk) { return 1e-8 * (1.0 + initial_risk); }

std::size_t default_max_iter(const LossSpec& spec) {
  const bool strongly_convex = spec.strong_convexity && *spec.strong_convexity > 0.0;
  return strongly_convex ? 1'000'000 : 100'000;
}

namespace {

double step_constant(const LossSpec& spec) {
  if (!spec.smoothness || !(*spec.smoothness > 0.0))
    throw std::invalid_argument("solver needs a certified smoothness constant G > 0");
  return *spec.smoothness;
}

void check_shard(const Dataset& shard, const FeatureSpace& space) {
  if (shard.empty()) throw std::invalid_argument("empty shard");
  if (static_cast<std::size_t>(shard.features.cols()) != space.dim())
    throw std::invalid_argument("shard features do not match space dimension");
}

}  // namespace

SolveReport solve_erm(const Dataset& shard, const LossSpec& spec, const FeatureSpace& space,
                      const SolveOptions& options) {
  check_shard(shard, space);
  const double G = step_constant(spec);
  const double B = space.radius();

  Eigen::VectorXd w = options.start ? *options.start
                                    : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim()));
  if (static_cast<std::size_t>(w.size()) != space.dim())
    throw std::invalid_argument("start point does not match space dimension");
  project_to_ball_inplace(w, B);

  Eigen::VectorXd grad;
  Eigen::VectorXd next;
  double risk = empirical_risk_and_gradient(spec, w, shard, grad);

  SolveReport report;
  report.tolerance = options.tolerance > 0.0 ? options.tolerance : default_tolerance(risk);
  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : default_max_iter(spec);
  if (options.record_history) report.risk_history.push_back(risk);

  for (std::size_t it = 0;; ++it) {
    next = w - grad / G;
    project_to_ball_inplace(next, B);
    report.residual = G * (w - next).norm();
    report.iterations = it;
    if (report.residual <= report.tolerance) {
      report.converged = true;
      break;
    }
    if (it == max_iter) break;
    w.swap(next);
    risk = empirical_risk_and_gradient(spec, w, shard, grad);
    if (options.record_history) report.risk_history.push_back(risk);
  }
  report.predictor = Predictor::from_weights(space, std::move(w));
  return report;
}

Predictor solve_ridge_closed_form(const Dataset& shard, double ridge, const FeatureSpace& space) {
  check_shard(shard, space);
  if (ridge < 0.0) throw std::invalid_argument("ridge coefficient must be nonnegative");
  const double n = static_cast<double>(shard.size());
  const auto d = static_cast<Eigen::Index>(space.dim());

  Eigen::MatrixXd A = shard.features.transpose() * shard.features / n;
  A.diagonal().array() += ridge;
  const Eigen::VectorXd b = shard.features.transpose() * shard.labels / n;

  if (ridge > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) return Predictor::from_weights(space, llt.solve(b));
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  if (lu.rank() < d) throw std::domain_error("singular normal equations");
  return Predictor::from_weights(space, lu.solve(b));
}

double check_optimality(const Predictor& f, const Dataset& shard, const LossSpec& spec,
                        const FeatureSpace& space) {
  check_shard(shard, space);
  if (f.space_tag != space.tag()) throw std::invalid_argument("predictor belongs to another space");
  const double G = step_constant(spec);
  const Eigen::VectorXd grad = empirical_gradient(spec, f.weights, shard);
  Eigen::VectorXd next = f.weights - grad / G;
  project_to_ball_inplace(next, space.radius());
  return G * (f.weights - next).norm();
}

}  // namespace dcerm
