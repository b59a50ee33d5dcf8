#include "dcerm/divide_conquer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dcerm/parallel.hpp"
#include "dcerm/rng.hpp"

namespace dcerm {

std::vector<std::vector<std::size_t>> Partition::shards() const {
  std::vector<std::vector<std::size_t>> out(m);
  for (std::size_t j = 0; j < assignment.size(); ++j) out[assignment[j]].push_back(j);
  return out;
}

Partition partition(std::size_t n_examples, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m > n_examples) throw std::invalid_argument("need 1 <= m <= N");
  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  // Fisher-Yates with explicit draws.
  for (std::size_t i = n_examples; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }

  Partition p;
  p.m = m;
  p.seed = seed;
  p.assignment.assign(n_examples, 0);
  const std::size_t base = n_examples / m;
  const std::size_t extra = n_examples % m;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t size = base + (s < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) p.assignment[order[pos++]] = s;
  }
  return p;
}

Partition partition(const Dataset& data, std::size_t m, std::uint64_t seed) {
  return partition(data.size(), m, seed);
}

bool DcResult::all_converged() const {
  return std::all_of(reports.begin(), reports.end(), [](const SolveReport& r) { return r.converged; });
}

double DcResult::max_residual() const {
  double out = 0.0;
  for (const auto& r : reports) out = std::max(out, r.residual);
  return out;
}

Predictor average(std::span<const Predictor> locals) {
  if (locals.empty()) throw std::invalid_argument("average of an empty list");
  Predictor out = locals.front();
  for (std::size_t i = 1; i < locals.size(); ++i) {
    if (locals[i].space_tag != out.space_tag || locals[i].weights.size() != out.weights.size())
      throw std::invalid_argument("locals from different spaces");
    out.weights += locals[i].weights;
  }
  out.weights /= static_cast<double>(locals.size());
  return out;
}

double diversity(std::span<const Predictor> locals) {
  const std::size_t m = locals.size();
  if (m <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      sum += (locals[i].weights - locals[j].weights).squaredNorm();
  // Each unordered pair appears twice in the ordered sum.
  return 2.0 * sum / (4.0 * static_cast<double>(m) * static_cast<double>(m));
}

DcResult run_divide_conquer(const Dataset& data, std::size_t m, const LossSpec& spec,
                            const FeatureSpace& space, const SolveOptions& options,
                            std::uint64_t seed, std::size_t threads) {
  DcResult result;
  result.partition = partition(data, m, seed);
  const auto shards = result.partition.shards();

  result.reports.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    result.reports[i] = solve_erm(data.subset(shards[i]), spec, space, options);
  });

  result.locals.reserve(m);
  for (const auto& r : result.reports) result.locals.push_back(r.predictor);
  result.global = average(result.locals);
  result.diversity = diversity(result.locals);
  return result;
}

}  // namespace dcerm
