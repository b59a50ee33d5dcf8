#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dcerm/dataset.hpp"
#include "dcerm/hypothesis.hpp"
#include "dcerm/losses.hpp"

namespace dcerm {

struct SolveOptions {
  /// Residual tolerance; 0 selects 1e-8 * (1 + initial empirical risk).
  double tolerance = 0.0;
  /// Iteration cap; 0 selects 1e6 for strongly convex specs and 1e5 otherwise.
  std::size_t max_iter = 0;
  /// Starting weights; the zero predictor when absent.
  std::optional<Eigen::VectorXd> start;
  /// Keep the empirical risk after every iteration in SolveReport::risk_history.
  bool record_history = false;
};

struct SolveReport {
  Predictor predictor;
  std::size_t iterations = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  std::vector<double> risk_history;
};

double default_tolerance(double initial_risk);
std::size_t default_max_iter(const LossSpec& spec);

/// Projected gradient descent on the empirical risk over the ball
/// ||w|| <= space.radius(), with fixed step 1/G from the certified constants.
/// Non-convergence is reported through SolveReport::converged.
SolveReport solve_erm(const Dataset& shard, const LossSpec& spec, const FeatureSpace& space,
                      const SolveOptions& options = {});

/// Exact solution of (Phi^T Phi / n + ridge I) w = Phi^T y / n.
/// Unconstrained: the norm ball is not applied. Throws std::domain_error when
/// the system is singular.
Predictor solve_ridge_closed_form(const Dataset& shard, double ridge, const FeatureSpace& space);

/// Projected-gradient fixed-point residual
///   G * || w - P_B(w - grad R(w) / G) ||.
/// Zero exactly at constrained minimizers of the convex empirical risk.
double check_optimality(const Predictor& f, const Dataset& shard, const LossSpec& spec,
                        const FeatureSpace& space);

}  // namespace dcerm
