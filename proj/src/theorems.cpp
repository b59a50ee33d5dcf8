#include "dcerm/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dcerm {

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::log_covering: return "1";
    case TheoremId::poly_covering: return "2";
    case TheoremId::non_strongly_convex: return "3";
  }
  return "?";
}

TheoremId parse_theorem_id(std::string_view text) {
  if (text == "1") return TheoremId::log_covering;
  if (text == "2") return TheoremId::poly_covering;
  if (text == "3") return TheoremId::non_strongly_convex;
  throw std::invalid_argument("unknown theorem id: " + std::string(text));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const TheoremInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(in.n >= 1.0)) throw std::invalid_argument("N must be >= 1");
  if (!(in.h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(in.tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  if (!(in.optimal_risk >= 0.0)) throw std::invalid_argument("R* must be nonnegative");
  if (!(in.r >= 0.0 && in.r <= 0.5)) throw std::invalid_argument("r must lie in [0, 1/2]");
  if (!(in.smoothness > 0.0) || !(in.lipschitz > 0.0) || !(in.strong_convexity >= 0.0))
    throw std::invalid_argument("constants must be positive (eta nonnegative)");
}

ProcessorBound finish(std::array<double, 4> terms) {
  return {terms, *std::min_element(terms.begin(), terms.end())};
}

}  // namespace

ProcessorBound processor_bound_thm1(const TheoremInputs& in) {
  validate(in);
  const double N = in.n, G = in.smoothness, L = in.lipschitz, eta = in.strong_convexity;
  const double log2d = std::log(2.0 / in.delta);
  return finish({
      N * eta / (8.0 * G * in.h * std::log(N / in.delta)),
      std::sqrt(N * in.h * eta) / (L * log2d),
      in.optimal_risk > 0.0
          ? (in.h * eta + N * eta * eta * in.tau) / (128.0 * G * in.optimal_risk * log2d)
          : kInf,
      N * eta / (G * L * std::log(2.0 * N / in.delta)),
  });
}

ProcessorBound processor_bound_thm2(const TheoremInputs& in) {
  validate(in);
  const double N = in.n, G = in.smoothness, L = in.lipschitz, eta = in.strong_convexity;
  const double a = 1.0 / (2.0 * in.h + 1.0);
  const double log2d = std::log(2.0 / in.delta);
  return finish({
      N * eta / (4.0 * (std::pow(N, a) + log2d)),
      std::sqrt(eta) * std::pow(N, (in.h + 1.0) * a) / (L * log2d),
      eta * std::pow(N, in.h * a) / (G * L * log2d),
      in.optimal_risk > 0.0
          ? (eta * std::pow(N, a) + N * eta * eta * in.tau) / (128.0 * in.optimal_risk * log2d)
          : kInf,
  });
}

double max_processors_thm1(const TheoremInputs& in) { return processor_bound_thm1(in).value; }
double max_processors_thm2(const TheoremInputs& in) { return processor_bound_thm2(in).value; }

double max_processors_thm3(const TheoremInputs& in) {
  validate(in);
  return std::pow(in.n, in.r);
}

double max_processors(TheoremId id, const TheoremInputs& in) {
  switch (id) {
    case TheoremId::log_covering: return max_processors_thm1(in);
    case TheoremId::poly_covering: return max_processors_thm2(in);
    case TheoremId::non_strongly_convex: return max_processors_thm3(in);
  }
  throw std::invalid_argument("invalid theorem id");
}

double predicted_rate(TheoremId id, double h, double r) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(r >= 0.0 && r <= 0.5)) throw std::invalid_argument("r must lie in [0, 1/2]");
  switch (id) {
    case TheoremId::log_covering: return -1.0;
    case TheoremId::poly_covering: return -2.0 * h / (2.0 * h + 1.0);
    case TheoremId::non_strongly_convex: return -(1.0 - r);
  }
  throw std::invalid_argument("invalid theorem id");
}

}  // namespace dcerm
