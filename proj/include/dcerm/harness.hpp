#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcerm/config.hpp"
#include "dcerm/risk.hpp"
#include "dcerm/theorems.hpp"

namespace dcerm {

inline constexpr const char* kSweepCsvHeader =
    "N,m,seed,excess_risk,excess_risk_stderr,tau_hat,solver_residual_max,wall_ms";

struct SweepRow {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t seed = 0;
  double excess_risk = 0.0;
  double excess_risk_stderr = 0.0;
  double tau_hat = 0.0;
  double solver_residual_max = 0.0;
  double wall_ms = 0.0;
  bool converged = true;
};

struct RateFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  /// N values that entered the fit and their seed-averaged excess risk.
  std::vector<std::size_t> n_values;
  std::vector<double> mean_excess;
  /// N values dropped for a nonpositive mean.
  std::vector<std::size_t> dropped;
};

struct ThresholdCheck {
  std::size_t n = 0;
  std::size_t m = 0;
  double tau_mean = 0.0;
  double bound = 0.0;
  bool certified = false;  // bound >= 1
  bool respected = false;  // m <= bound
};

struct RegimeVerdict {
  TheoremId theorem = TheoremId::log_covering;
  double fitted_slope = 0.0;
  double predicted = 0.0;
  double margin = 0.25;
  bool pass = false;
  std::vector<ThresholdCheck> thresholds;
  bool m_rule_respected = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<RateFit> fit;
  std::optional<RegimeVerdict> verdict;
  LossSpec loss;
  double optimal_risk = 0.0;
  double optimal_risk_stderr = 0.0;
  std::vector<std::string> warnings;
};

/// Per-cell seed: derive_seed(config seed, {N, m, seed index}).
std::uint64_t cell_seed(std::uint64_t config_seed, std::size_t n, std::size_t m,
                        std::size_t seed_index);

/// Runs every (N, m(N), seed) cell. Rows come back in (N, m, seed) order for
/// any thread count. Infeasible cells (m > N) are skipped with a warning.
SweepResult run_sweep(const SweepConfig& cfg);

/// OLS of log(mean excess risk over seeds) on log N. N values whose mean is
/// nonpositive are dropped. Throws std::domain_error with fewer than two
/// usable N.
RateFit fit_rate_exponent(const std::vector<SweepRow>& rows);

/// pass iff fitted slope <= predicted + margin, plus the processor-count
/// threshold at every N.
RegimeVerdict check_regime(const SweepResult& result, const SweepConfig& cfg, TheoremId id);

/// Writes `sweep.csv` and `report.txt` under `dir`, overwriting.
void emit_report(const SweepResult& result, const SweepConfig& cfg,
                 const std::filesystem::path& dir);
std::string render_csv(const std::vector<SweepRow>& rows);
std::string render_report(const SweepResult& result, const SweepConfig& cfg);
std::vector<SweepRow> parse_csv(const std::filesystem::path& path);

/// Completes a result from rows alone (fit, verdict, constants), used by
/// `erm report` on an existing CSV.
SweepResult summarize(std::vector<SweepRow> rows, const SweepConfig& cfg);

}  // namespace dcerm
