#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dcerm/dataset.hpp"
#include "dcerm/hypothesis.hpp"
#include "dcerm/losses.hpp"
#include "dcerm/solver.hpp"

namespace dcerm {

/// Assignment of N examples to m disjoint shards.
struct Partition {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  /// assignment[j] is the shard of example j.
  std::vector<std::size_t> assignment;

  /// Example indices per shard, each in increasing order of shuffled position.
  std::vector<std::vector<std::size_t>> shards() const;
};

/// Uniform shuffle followed by a contiguous split. The first N mod m shards
/// get ceil(N/m) examples, the rest floor(N/m).
Partition partition(std::size_t n_examples, std::size_t m, std::uint64_t seed);
Partition partition(const Dataset& data, std::size_t m, std::uint64_t seed);

struct DcResult {
  Predictor global;
  std::vector<Predictor> locals;
  double diversity = 0.0;
  std::vector<SolveReport> reports;
  Partition partition;

  bool all_converged() const;
  double max_residual() const;
};

Predictor average(std::span<const Predictor> locals);

/// (1/4m^2) * sum over ordered pairs i != j of ||f_i - f_j||^2.
double diversity(std::span<const Predictor> locals);

/// Partition, solve every shard independently, average. Shard solves may run
/// on `threads` workers; the result does not depend on the schedule.
DcResult run_divide_conquer(const Dataset& data, std::size_t m, const LossSpec& spec,
                            const FeatureSpace& space, const SolveOptions& options,
                            std::uint64_t seed, std::size_t threads = 1);

}  // namespace dcerm
