#include "dcerm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dcerm/divide_conquer.hpp"
#include "dcerm/parallel.hpp"
#include "dcerm/rng.hpp"

namespace dcerm {

std::uint64_t cell_seed(std::uint64_t config_seed, std::size_t n, std::size_t m,
                        std::size_t seed_index) {
  return derive_seed(config_seed, {n, m, seed_index});
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

struct Cell {
  std::size_t n;
  std::size_t m;
  std::size_t seed;
};

OptimalReference reference_for(const SweepConfig& cfg) {
  return optimal_reference(cfg.distribution, cfg.loss,
                           {cfg.reference_samples, cfg.reference_samples,
                            derive_seed(cfg.seed, {stream::reference})});
}

void attach_analysis(SweepResult& result, const SweepConfig& cfg) {
  std::map<std::size_t, std::size_t> per_n;
  for (const auto& row : result.rows) ++per_n[row.n];
  if (per_n.size() >= 2) {
    try {
      result.fit = fit_rate_exponent(result.rows);
      for (std::size_t n : result.fit->dropped)
        result.warnings.push_back("N=" + std::to_string(n) +
                                  " dropped from the rate fit: nonpositive mean excess risk");
    } catch (const std::domain_error& e) {
      result.warnings.push_back(std::string("rate fit skipped: ") + e.what());
    }
  }
  if (result.fit && cfg.seed_count < 5)
    result.warnings.push_back("fewer than 5 seeds per N: the averaged rate fit is unreliable");
  if (cfg.theorem && result.fit) result.verdict = check_regime(result, cfg, *cfg.theorem);
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.loss = cfg.loss.certified() ? cfg.loss : certify_constants(cfg.loss, cfg.distribution.loss_domain());
  const OptimalReference reference = reference_for(cfg);
  result.optimal_risk = reference.risk.value;
  result.optimal_risk_stderr = reference.risk.stderr_;

  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_grid) {
    const std::size_t m = cfg.m_rule.evaluate(n);
    if (m > n) {
      result.warnings.push_back("skipped infeasible cell N=" + std::to_string(n) +
                                " m=" + std::to_string(m));
      continue;
    }
    for (std::size_t s = 0; s < cfg.seed_count; ++s) cells.push_back({n, m, s});
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  SolveOptions options;
  options.tolerance = cfg.tolerance;
  options.max_iter = cfg.max_iter;

  result.rows.resize(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t cs = cell_seed(cfg.seed, c.n, c.m, c.seed);
    const Dataset data = sample_dataset(cfg.distribution, c.n, derive_seed(cs, {stream::dataset}));
    const DcResult dc = run_divide_conquer(data, c.m, result.loss, cfg.space(), options,
                                           derive_seed(cs, {stream::partition}));
    const RiskEstimate ex = excess_risk(dc.global, cfg.distribution, result.loss, reference,
                                        cfg.mc_samples, derive_seed(cs, {stream::risk_mc}));
    SweepRow& row = result.rows[i];
    row.n = c.n;
    row.m = c.m;
    row.seed = c.seed;
    row.excess_risk = ex.value;
    row.excess_risk_stderr = ex.stderr_;
    row.tau_hat = dc.diversity;
    row.solver_residual_max = dc.max_residual();
    row.converged = dc.all_converged();
    if (cfg.record_timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  for (const auto& row : result.rows)
    if (!row.converged)
      result.warnings.push_back("solver did not converge in cell N=" + std::to_string(row.n) +
                                " m=" + std::to_string(row.m) + " seed=" + std::to_string(row.seed));
  attach_analysis(result, cfg);
  return result;
}

RateFit fit_rate_exponent(const std::vector<SweepRow>& rows) {
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (const auto& row : rows) {
    auto& a = acc[row.n];
    a.first += row.excess_risk;
    ++a.second;
  }
  RateFit fit;
  for (const auto& [n, a] : acc) {
    const double mean = a.first / static_cast<double>(a.second);
    if (mean > 0.0) {
      fit.n_values.push_back(n);
      fit.mean_excess.push_back(mean);
    } else {
      fit.dropped.push_back(n);
    }
  }
  const std::size_t k = fit.n_values.size();
  if (k < 2) throw std::domain_error("rate fit needs two N values with positive mean excess risk");

  std::vector<double> x(k), y(k);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(static_cast<double>(fit.n_values[i]));
    y[i] = std::log(fit.mean_excess[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (k > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ssr += r * r;
    }
    fit.stderr_ = std::sqrt(ssr / static_cast<double>(k - 2) / sxx);
  }
  return fit;
}

RegimeVerdict check_regime(const SweepResult& result, const SweepConfig& cfg, TheoremId id) {
  if (!result.fit) throw std::invalid_argument("check_regime needs a fitted slope");
  RegimeVerdict v;
  v.theorem = id;
  v.fitted_slope = result.fit->slope;
  v.predicted = predicted_rate(id, cfg.space().covering_parameter(), cfg.r);
  v.margin = cfg.margin;
  v.pass = v.fitted_slope <= v.predicted + v.margin;

  std::map<std::size_t, std::pair<double, std::size_t>> tau;
  std::map<std::size_t, std::size_t> m_of;
  for (const auto& row : result.rows) {
    auto& t = tau[row.n];
    t.first += row.tau_hat;
    ++t.second;
    m_of[row.n] = row.m;
  }
  v.m_rule_respected = !tau.empty();
  for (const auto& [n, t] : tau) {
    TheoremInputs in;
    in.n = static_cast<double>(n);
    in.delta = cfg.delta;
    in.h = cfg.space().covering_parameter();
    in.smoothness = *result.loss.smoothness;
    in.lipschitz = *result.loss.lipschitz;
    in.strong_convexity = *result.loss.strong_convexity;
    in.tau = t.first / static_cast<double>(t.second);
    in.optimal_risk = std::max(0.0, result.optimal_risk);
    in.r = cfg.r;
    ThresholdCheck c;
    c.n = n;
    c.m = m_of[n];
    c.tau_mean = in.tau;
    c.bound = max_processors(id, in);
    c.certified = c.bound >= 1.0;
    c.respected = static_cast<double>(c.m) <= c.bound;
    v.m_rule_respected = v.m_rule_respected && c.respected;
    v.thresholds.push_back(c);
  }
  return v;
}

std::string render_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.seed) + ',' +
           num(r.excess_risk) + ',' + num(r.excess_risk_stderr) + ',' + num(r.tau_hat) + ',' +
           num(r.solver_residual_max) + ',' + fmt("%.3f", r.wall_ms) + '\n';
  }
  return out;
}

std::vector<SweepRow> parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader)
    throw std::runtime_error(path.string() + ": unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[8];
    for (auto& field : f)
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short CSV row: " + line);
    SweepRow r;
    r.n = std::stoull(f[0]);
    r.m = std::stoull(f[1]);
    r.seed = std::stoull(f[2]);
    r.excess_risk = std::stod(f[3]);
    r.excess_risk_stderr = std::stod(f[4]);
    r.tau_hat = std::stod(f[5]);
    r.solver_residual_max = std::stod(f[6]);
    r.wall_ms = std::stod(f[7]);
    rows.push_back(r);
  }
  return rows;
}

std::string render_report(const SweepResult& result, const SweepConfig& cfg) {
  std::ostringstream os;
  os << "divide-and-conquer ERM sweep report\n\n";
  os << "space: " << cfg.space().describe() << "\n";
  os << "covering regime: " << to_string(cfg.space().covering_regime())
     << " (h = " << num(cfg.space().covering_parameter()) << ")\n";
  os << "loss: " << to_string(result.loss.family) << ", ridge = " << num(result.loss.ridge);
  if (result.loss.family == LossFamily::squared_epsilon) os << ", epsilon = " << num(result.loss.epsilon);
  os << "\n";
  os << "distribution: noise " << to_string(cfg.distribution.noise) << " sigma = "
     << num(cfg.distribution.sigma) << ", labels " << to_string(cfg.distribution.labels)
     << ", Y = " << num(cfg.distribution.label_bound) << "\n";
  os << "m rule: " << cfg.m_rule.describe() << ", r = " << num(cfg.r) << ", seeds = " << cfg.seed_count
     << ", delta = " << num(cfg.delta) << "\n\n";

  os << "certified constants\n";
  os << "  G   = " << num(result.loss.smoothness.value_or(NAN)) << "\n";
  os << "  L   = " << num(result.loss.lipschitz.value_or(NAN)) << "\n";
  os << "  eta = " << num(result.loss.strong_convexity.value_or(NAN)) << "\n";
  os << "optimal risk R* = " << num(result.optimal_risk) << " (stderr " << num(result.optimal_risk_stderr)
     << ")\n\n";

  std::map<std::size_t, std::tuple<double, double, std::size_t, std::size_t>> per_n;
  for (const auto& r : result.rows) {
    auto& [ex, tau, count, m] = per_n[r.n];
    ex += r.excess_risk;
    tau += r.tau_hat;
    ++count;
    m = r.m;
  }
  os << "per-N means\n  N        m      mean_excess_risk        mean_tau_hat\n";
  for (const auto& [n, v] : per_n) {
    const auto& [ex, tau, count, m] = v;
    os << "  " << fmt("%-8.0f", static_cast<double>(n)) << " " << fmt("%-6.0f", static_cast<double>(m))
       << " " << fmt("%-23.10e", ex / count) << " " << fmt("%.10e", tau / count) << "\n";
  }
  os << "\n";

  if (result.fit) {
    os << "fitted log-log slope: " << fmt("%.6f", result.fit->slope) << " +/- "
       << fmt("%.6f", result.fit->stderr_) << "\n";
  } else {
    os << "fitted log-log slope: not available\n";
  }

  if (result.verdict) {
    const auto& v = *result.verdict;
    os << "\nregime check (theorem " << to_string(v.theorem) << ")\n";
    os << "  predicted exponent: " << fmt("%.6f", v.predicted) << "\n";
    os << "  margin:             " << fmt("%.3f", v.margin) << "\n";
    os << "  verdict:            " << (v.pass ? "PASS" : "FAIL") << " (fitted "
       << fmt("%.6f", v.fitted_slope) << " <= " << fmt("%.6f", v.predicted + v.margin) << " required)\n";
    os << "  processor thresholds:\n";
    for (const auto& c : v.thresholds) {
      os << "    N=" << c.n << " m=" << c.m << " bound=" << fmt("%.6g", c.bound)
         << " tau_mean=" << fmt("%.6g", c.tau_mean) << " -> ";
      if (!c.certified)
        os << "no distributed regime certified at these constants\n";
      else
        os << (c.respected ? "m within bound\n" : "m exceeds bound\n");
    }
    os << "  m rule respected the threshold at every N: " << (v.m_rule_respected ? "yes" : "no") << "\n";
    if (v.theorem == TheoremId::non_strongly_convex && !v.thresholds.empty()) {
      const auto n = v.thresholds.back().n;
      const double cap = std::pow(static_cast<double>(n), cfg.r - 1.0);
      os << "  small optimal risk R* <= N^(r-1) at N=" << n << " (" << fmt("%.6g", cap)
         << "): " << (result.optimal_risk <= cap ? "yes" : "no") << "\n";
    }
  }

  if (!result.warnings.empty()) {
    os << "\nwarnings\n";
    for (const auto& w : result.warnings) os << "  " << w << "\n";
  }
  os << "\nconfiguration\n" << cfg.to_text();
  return os.str();
}

void emit_report(const SweepResult& result, const SweepConfig& cfg,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
  };
  write(dir / "sweep.csv", render_csv(result.rows));
  write(dir / "report.txt", render_report(result, cfg));
}

SweepResult summarize(std::vector<SweepRow> rows, const SweepConfig& cfg) {
  SweepResult result;
  result.rows = std::move(rows);
  result.loss = cfg.loss.certified() ? cfg.loss : certify_constants(cfg.loss, cfg.distribution.loss_domain());
  const OptimalReference reference = reference_for(cfg);
  result.optimal_risk = reference.risk.value;
  result.optimal_risk_stderr = reference.risk.stderr_;
  attach_analysis(result, cfg);
  return result;
}

}  // namespace dcerm
