// erm: command-line driver for divide-and-conquer ERM experiments.
//
//   erm solve   --config FILE [--n N] [--seed S]
//   erm dc-run  --config FILE [--n N] [--m M] [--seed S] [--threads T] [--out DIR]
//   erm sweep   --config FILE [--seed S] [--threads T] [--out DIR]
//   erm cover   [--config FILE | --kind K --dim D ...] [--eps LIST] [--samples S] [--seed S]
//   erm report  --config FILE [--csv PATH] [--out DIR]
//
// Exit status: 0 success, 2 regime check failed, 1 any error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcerm/config.hpp"
#include "dcerm/covering.hpp"
#include "dcerm/divide_conquer.hpp"
#include "dcerm/harness.hpp"
#include "dcerm/rng.hpp"
#include "dcerm/solver.hpp"

using namespace dcerm;

namespace {

constexpr int kRegimeFailure = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
};

SweepConfig load(const Common& c) {
  SweepConfig cfg = SweepConfig::from_file(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.out) cfg.out = *c.out;
  cfg.validate();
  return cfg;
}

void print_reference(const OptimalReference& ref) {
  std::printf("optimal risk R* = %.10g (%s, stderr %.3g)\n", ref.risk.value,
              std::string(to_string(ref.risk.method)).c_str(), ref.risk.stderr_);
}

int run_solve(const Common& c, std::optional<std::size_t> n_opt) {
  const SweepConfig cfg = load(c);
  const std::size_t n = n_opt.value_or(cfg.n_grid.front());
  const std::uint64_t cs = cell_seed(cfg.seed, n, 1, 0);
  const Dataset data = sample_dataset(cfg.distribution, n, derive_seed(cs, {stream::dataset}));
  SolveOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.max_iter = cfg.max_iter;
  const SolveReport rep = solve_erm(data, cfg.loss, cfg.space(), opt);
  const OptimalReference ref = optimal_reference(
      cfg.distribution, cfg.loss,
      {cfg.reference_samples, cfg.reference_samples, derive_seed(cfg.seed, {stream::reference})});
  const RiskEstimate ex = excess_risk(rep.predictor, cfg.distribution, cfg.loss, ref, cfg.mc_samples,
                                      derive_seed(cs, {stream::risk_mc}));
  std::printf("N = %zu\niterations = %zu\nresidual = %.3e (tol %.3e)\nconverged = %s\n", n,
              rep.iterations, rep.residual, rep.tolerance, rep.converged ? "yes" : "no");
  std::printf("||w|| = %.10g\n", norm(rep.predictor));
  print_reference(ref);
  std::printf("excess risk = %.10g (stderr %.3g)\n", ex.value, ex.stderr_);
  return rep.converged ? 0 : 1;
}

int run_dc(const Common& c, std::optional<std::size_t> n_opt, std::optional<std::size_t> m_opt) {
  const SweepConfig cfg = load(c);
  const std::size_t n = n_opt.value_or(cfg.n_grid.front());
  const std::size_t m = m_opt.value_or(cfg.m_rule.evaluate(n));
  const std::uint64_t cs = cell_seed(cfg.seed, n, m, 0);
  const Dataset data = sample_dataset(cfg.distribution, n, derive_seed(cs, {stream::dataset}));
  SolveOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.max_iter = cfg.max_iter;
  const DcResult dc = run_divide_conquer(data, m, cfg.loss, cfg.space(), opt,
                                         derive_seed(cs, {stream::partition}), cfg.threads);
  const OptimalReference ref = optimal_reference(
      cfg.distribution, cfg.loss,
      {cfg.reference_samples, cfg.reference_samples, derive_seed(cfg.seed, {stream::reference})});
  const RiskEstimate ex = excess_risk(dc.global, cfg.distribution, cfg.loss, ref, cfg.mc_samples,
                                      derive_seed(cs, {stream::risk_mc}));
  std::printf("N = %zu, m = %zu\n", n, m);
  std::printf("tau_hat = %.10g\nmax solver residual = %.3e\nall converged = %s\n", dc.diversity,
              dc.max_residual(), dc.all_converged() ? "yes" : "no");
  print_reference(ref);
  std::printf("excess risk of the average = %.10g (stderr %.3g)\n", ex.value, ex.stderr_);
  if (c.out) {
    SweepRow row{n, m, 0, ex.value, ex.stderr_, dc.diversity, dc.max_residual(), 0.0, dc.all_converged()};
    std::filesystem::create_directories(*c.out);
    std::ofstream(std::filesystem::path(*c.out) / "dc_run.csv", std::ios::trunc) << render_csv({row});
  }
  return dc.all_converged() ? 0 : 1;
}

int run_sweep_cmd(const Common& c) {
  const SweepConfig cfg = load(c);
  const SweepResult result = run_sweep(cfg);
  emit_report(result, cfg, cfg.out);
  std::cout << render_report(result, cfg);
  std::printf("\nwrote %s and %s\n", (cfg.out / "sweep.csv").c_str(), (cfg.out / "report.txt").c_str());
  return result.verdict && !result.verdict->pass ? kRegimeFailure : 0;
}

int run_report(const Common& c, const std::optional<std::string>& csv) {
  const SweepConfig cfg = load(c);
  const std::filesystem::path path = csv ? std::filesystem::path(*csv) : cfg.out / "sweep.csv";
  SweepResult result = summarize(parse_csv(path), cfg);
  const std::filesystem::path dir = c.out ? std::filesystem::path(*c.out) : path.parent_path();
  std::filesystem::create_directories(dir.empty() ? "." : dir);
  std::ofstream(dir / "report.txt", std::ios::trunc) << render_report(result, cfg);
  std::cout << render_report(result, cfg);
  return result.verdict && !result.verdict->pass ? kRegimeFailure : 0;
}

struct CoverArgs {
  std::string kind = "linear";
  std::size_t dim = 2;
  double decay = 1.0;
  double radius = 1.0;
  std::string domain = "hypercube";
  std::vector<double> eps{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2};
  std::size_t samples = 20000;
};

int run_cover(const Common& c, const CoverArgs& a) {
  std::optional<FeatureSpace> space;
  if (!c.config.empty()) {
    space = load(c).space();
  } else {
    const SpaceKind kind = parse_space_kind(a.kind);
    const InputDomain domain = parse_input_domain(a.domain);
    if (kind == SpaceKind::eigen_decay) space = FeatureSpace::eigen_decay(a.dim, a.decay, a.radius, domain);
    else if (kind == SpaceKind::finite_rank_kernel) space = FeatureSpace::finite_rank(a.dim, a.dim, a.radius, domain);
    else space = FeatureSpace::linear(a.dim, a.radius, domain);
  }
  const CoveringEstimate est = estimate_regime(*space, space->radius(), a.eps, a.samples,
                                               derive_seed(c.seed.value_or(0), {stream::covering}));
  std::printf("space: %s\nsamples: %zu\n  eps        cover_size\n", space->describe().c_str(), est.sample_count);
  for (std::size_t j = 0; j < est.eps_grid.size(); ++j)
    std::printf("  %-10.4g %zu\n", est.eps_grid[j], est.cover_sizes[j]);
  std::printf("logarithmic fit: h = %.4f, residual %.4g\n", est.logarithmic.h, est.logarithmic.residual);
  std::printf("polynomial fit:  h = %.4f, residual %.4g\n", est.polynomial.h, est.polynomial.residual);
  std::printf("selected regime: %s, h_hat = %.4f\n", std::string(to_string(est.regime)).c_str(), est.h_hat);
  return 0;
}

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("--config", c.config, "sectioned key-value config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--threads", c.threads, "worker threads");
  cmd->add_option("--out", c.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divide-and-conquer ERM harness"};
  app.require_subcommand(1);

  Common solve_c, dc_c, sweep_c, cover_c, report_c;
  std::optional<std::size_t> solve_n, dc_n, dc_m;
  std::optional<std::string> report_csv;
  CoverArgs cover_a;

  auto* solve = app.add_subcommand("solve", "centralized ERM on one sample");
  add_common(solve, solve_c);
  solve->add_option("--n", solve_n, "sample size (default: first n_grid entry)");

  auto* dc = app.add_subcommand("dc-run", "one divide-and-conquer run");
  add_common(dc, dc_c);
  dc->add_option("--n", dc_n, "sample size (default: first n_grid entry)");
  dc->add_option("--m", dc_m, "number of shards (default: the config m rule)");

  auto* sweep = app.add_subcommand("sweep", "full (N, m, seed) sweep with CSV and report");
  add_common(sweep, sweep_c);

  auto* cover = app.add_subcommand("cover", "empirical covering-number regime estimate");
  add_common(cover, cover_c, false);
  cover->add_option("--kind", cover_a.kind, "linear | finite-rank-kernel | eigen-decay");
  cover->add_option("--dim", cover_a.dim, "feature dimension");
  cover->add_option("--decay", cover_a.decay, "eigen-decay exponent h");
  cover->add_option("--radius", cover_a.radius, "norm ball radius B");
  cover->add_option("--domain", cover_a.domain, "hypercube | sphere");
  cover->add_option("--eps", cover_a.eps, "eps grid in (0,1)")->delimiter(',');
  cover->add_option("--samples", cover_a.samples, "sampled predictors");

  auto* report = app.add_subcommand("report", "rebuild report.txt from an existing sweep.csv");
  add_common(report, report_c);
  report->add_option("--csv", report_csv, "sweep CSV (default: <out>/sweep.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return run_solve(solve_c, solve_n);
    if (*dc) return run_dc(dc_c, dc_n, dc_m);
    if (*sweep) return run_sweep_cmd(sweep_c);
    if (*cover) return run_cover(cover_c, cover_a);
    if (*report) return run_report(report_c, report_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
