#pragma once

#include <array>
#include <string_view>

namespace dcerm {

enum class TheoremId { log_covering = 1, poly_covering = 2, non_strongly_convex = 3 };

std::string_view to_string(TheoremId id);
TheoremId parse_theorem_id(std::string_view text);

struct TheoremInputs {
  double n = 0.0;
  double delta = 0.5;
  double h = 1.0;
  double smoothness = 1.0;        // G
  double lipschitz = 1.0;         // L
  double strong_convexity = 1.0;  // eta
  double tau = 0.0;
  double optimal_risk = 0.0;      // R*
  double r = 0.0;
};

/// The four terms of a processor-count bound and their minimum. A term that
/// does not apply (R* = 0) is +infinity.
struct ProcessorBound {
  std::array<double, 4> terms{};
  double value = 0.0;
};

/// Strongly convex loss, logarithmic covering:
///   min{ N eta / (8 G h log(N/delta)),  sqrt(N h eta) / (L log(2/delta)),
///        (h eta + N eta^2 tau) / (128 G R* log(2/delta)),  N eta / (G L log(2N/delta)) }
ProcessorBound processor_bound_thm1(const TheoremInputs& in);
/// Strongly convex loss, polynomial covering, with a = 1/(2h+1):
///   min{ N eta / (4 (N^a + log(2/delta))),  sqrt(eta) N^{(h+1)a} / (L log(2/delta)),
///        eta N^{h a} / (G L log(2/delta)),  (eta N^a + N eta^2 tau) / (128 R* log(2/delta)) }
ProcessorBound processor_bound_thm2(const TheoremInputs& in);

double max_processors_thm1(const TheoremInputs& in);
double max_processors_thm2(const TheoremInputs& in);
/// No strong convexity: m <= N^r (the order statement, constant taken as 1).
double max_processors_thm3(const TheoremInputs& in);
double max_processors(TheoremId id, const TheoremInputs& in);

/// Predicted exponent of N in the excess-risk bound, polylog factors ignored:
/// -1, -2h/(2h+1) and -(1-r) respectively.
double predicted_rate(TheoremId id, double h, double r);

}  // namespace dcerm
