#include "splinewalk/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "splinewalk/experiments.hpp"
#include "splinewalk/version.hpp"

namespace splinewalk {

namespace {

// Shared output options. The timestamp comment only appears when the caller
// opts out of deterministic output, keeping default files byte-stable.
struct OutputOpts {
  std::string out;
  std::string json_summary;
  bool deterministic = true;

  std::vector<std::string> extra_comments() const {
    if (deterministic) return {};
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return {std::string("generated_at: ") + buf};
  }
};

void add_output_opts(CLI::App* cmd, OutputOpts& opts, const std::string& default_out) {
  opts.out = default_out;
  cmd->add_option("--out", opts.out, "output CSV path")->capture_default_str();
  cmd->add_option("--json-summary", opts.json_summary, "optional JSON fit summary path");
  cmd->add_flag("--deterministic,!--no-deterministic", opts.deterministic,
                "suppress timestamps in output headers (default on)");
}

void maybe_write_fits(const OutputOpts& opts,
                      const std::vector<std::pair<std::string, FitResult>>& fits) {
  if (!opts.json_summary.empty()) write_fits_json(opts.json_summary, fits);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SPLINEWALK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // leave the OpenMP default
}

void print_fit(const std::string& name, const FitResult& f) {
  std::cout << name << ": slope " << f.slope << ", intercept " << f.intercept
            << ", resid_rms " << f.resid_rms << " (window [" << f.window.lo << ", "
            << f.window.hi << "], " << f.points << " points)\n";
}

}  // namespace

int run_command(int argc, const char* const* argv) {
  CLI::App app{"exact spline statistics of random rectifier networks and integrated random walks"};
  app.set_version_flag("--version", std::string("splinewalk ") + kVersion);
  app.require_subcommand(1);

  int threads_flag = 0;
  app.add_option("--threads", threads_flag,
                 "worker threads (default: SPLINEWALK_THREADS or all cores)");

  // knots
  KnotsRecipe knots;
  OutputOpts knots_out;
  std::string knots_dist = "uniform";
  {
    auto* cmd = app.add_subcommand("knots", "knot counts of random deep networks");
    cmd->add_option("--layers", knots.layers, "hidden layer counts")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--width", knots.widths, "neurons per layer")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--trials", knots.trials, "trials per size")->capture_default_str();
    cmd->add_option("--seed", knots.seed, "master seed")->capture_default_str();
    cmd->add_option("--dist", knots_dist, "weight/bias law: normal|uniform|rademacher")
        ->capture_default_str();
    add_output_opts(cmd, knots_out, "knots.csv");
  }

  // roots-table
  RootsTableRecipe roots;
  OutputOpts roots_out;
  {
    auto* cmd = app.add_subcommand("roots-table",
                                   "mean root counts for the studied distribution combinations");
    cmd->add_option("--n", roots.n, "neurons")->capture_default_str();
    cmd->add_option("--trials", roots.trials, "trials per row and domain")->capture_default_str();
    cmd->add_option("--seed", roots.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, roots_out, "roots_table.csv");
  }

  // crossings
  CrossingsRecipe crossings;
  OutputOpts crossings_out;
  {
    auto* cmd = app.add_subcommand("crossings",
                                   "mean zero crossings vs walk length, with semilog fits");
    cmd->add_option("--min-steps", crossings.min_steps, "smallest walk length")
        ->capture_default_str();
    cmd->add_option("--max-steps", crossings.max_steps, "largest walk length")
        ->capture_default_str();
    cmd->add_option("--trials", crossings.base_trials, "base trials per size")
        ->capture_default_str();
    cmd->add_option("--seed", crossings.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, crossings_out, "crossings.csv");
  }

  // survival
  SurvivalRecipe survival;
  OutputOpts survival_out;
  std::string survival_variant = "fixed";
  {
    auto* cmd = app.add_subcommand("survival",
                                   "exit-time survival, pre-crossing magnitudes, crossing PMF");
    cmd->add_option("--steps", survival.steps, "walk length")->capture_default_str();
    cmd->add_option("--trials", survival.trials, "trials")->capture_default_str();
    cmd->add_option("--variant", survival_variant, "fixed|network")->capture_default_str();
    cmd->add_option("--seed", survival.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, survival_out, "survival.csv");
  }

  // fudge / fudge-zeroed
  FudgeRecipe fudge;
  OutputOpts fudge_out;
  std::string fudge_coeff = "c0";
  FudgeRecipe fudge_zeroed;
  OutputOpts fudge_zeroed_out;
  std::string fudge_zeroed_coeff = "c0";
  {
    auto* cmd = app.add_subcommand("fudge", "mean roots as one line coefficient is rescaled");
    cmd->add_option("--coeff", fudge_coeff, "which coefficient to scale: c0|c1")
        ->capture_default_str();
    cmd->add_option("--factors", fudge.factors, "scale factors (default powers of two)")
        ->delimiter(',');
    cmd->add_option("--n", fudge.n, "neurons")->capture_default_str();
    cmd->add_option("--trials", fudge.trials, "trials per factor")->capture_default_str();
    cmd->add_option("--seed", fudge.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, fudge_out, "fudge.csv");
  }
  {
    auto* cmd = app.add_subcommand(
        "fudge-zeroed", "as fudge, with the other line coefficient forced to zero");
    cmd->add_option("--coeff", fudge_zeroed_coeff, "which coefficient to scale: c0|c1")
        ->capture_default_str();
    cmd->add_option("--factors", fudge_zeroed.factors, "scale factors (default powers of two)")
        ->delimiter(',');
    cmd->add_option("--n", fudge_zeroed.n, "neurons")->capture_default_str();
    cmd->add_option("--trials", fudge_zeroed.trials, "trials per factor")->capture_default_str();
    cmd->add_option("--seed", fudge_zeroed.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, fudge_zeroed_out, "fudge_zeroed.csv");
  }

  // variance
  VarianceRecipe variance;
  OutputOpts variance_out;
  {
    auto* cmd = app.add_subcommand("variance",
                                   "per-quantile variance of the zeroed-line walk, with fits");
    cmd->add_option("--n", variance.n, "neurons / quantile cells")->capture_default_str();
    cmd->add_option("--trials", variance.trials, "trials")->capture_default_str();
    cmd->add_option("--seed", variance.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, variance_out, "variance.csv");
  }

  // correlation
  CorrelationRecipe correlation;
  OutputOpts correlation_out;
  {
    auto* cmd = app.add_subcommand("correlation", "corr(y(x), y(x+h)) on the quantile grid");
    cmd->add_option("--n", correlation.n, "neurons / grid points")->capture_default_str();
    cmd->add_option("--trials", correlation.trials, "trials")->capture_default_str();
    cmd->add_option("--seed", correlation.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, correlation_out, "correlation.csv");
  }

  // gradient-dist
  GradientDistRecipe gradient;
  OutputOpts gradient_out;
  std::string gradient_weights = "normal";
  {
    auto* cmd = app.add_subcommand("gradient-dist",
                                   "bias-gradient distribution of zero-bias networks");
    cmd->add_option("--layers", gradient.layers, "hidden layers")->capture_default_str();
    cmd->add_option("--width", gradient.width, "neurons per layer")->capture_default_str();
    cmd->add_option("--layer", gradient.layer_i, "layer whose biases are probed")
        ->capture_default_str();
    cmd->add_option("--x", gradient.xs, "input points")->delimiter(',')->capture_default_str();
    cmd->add_option("--trials", gradient.trials, "networks sampled")->capture_default_str();
    cmd->add_option("--weights", gradient_weights, "weight law: normal|uniform|rademacher")
        ->capture_default_str();
    cmd->add_option("--seed", gradient.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, gradient_out, "gradient_dist.csv");
  }

  // order-stats
  OrderStatsRecipe order;
  OutputOpts order_out;
  std::string order_dist = "cauchy";
  {
    auto* cmd = app.add_subcommand("order-stats",
                                   "sample-minimum median against its closed form");
    cmd->add_option("--dist", order_dist, "normal|cauchy")->capture_default_str();
    cmd->add_option("--n", order.n, "draws per trial")->capture_default_str();
    cmd->add_option("--trials", order.trials, "trials")->capture_default_str();
    cmd->add_option("--seed", order.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, order_out, "order_stats.csv");
  }

  // decomposition
  DecompositionRecipe decomposition;
  OutputOpts decomposition_out;
  {
    auto* cmd = app.add_subcommand(
        "decomposition", "walk-vs-line decomposition traces with root cross-check");
    cmd->add_option("--n", decomposition.n, "neurons")->capture_default_str();
    cmd->add_option("--trials", decomposition.trials, "example networks")->capture_default_str();
    cmd->add_option("--max-samples", decomposition.max_samples, "points emitted per trial")
        ->capture_default_str();
    cmd->add_option("--seed", decomposition.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, decomposition_out, "decomposition.csv");
  }

  // equivalence-check
  EquivalenceRecipe equivalence;
  OutputOpts equivalence_out;
  {
    auto* cmd = app.add_subcommand(
        "equivalence-check", "path recurrence vs closed-form spline values at the knots");
    cmd->add_option("--seeds", equivalence.seeds, "networks checked")->capture_default_str();
    cmd->add_option("--n", equivalence.n, "neurons")->capture_default_str();
    cmd->add_option("--seed", equivalence.seed, "master seed")->capture_default_str();
    add_output_opts(cmd, equivalence_out, "equivalence.csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return 0;  // --help / --version
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  const int threads = resolve_threads(threads_flag);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (app.got_subcommand("knots")) {
      knots.dist = DistributionSpec::parse(knots_dist);
      const auto rows = run_knots(knots);
      write_knots_csv(knots_out.out, knots, rows, knots_out.extra_comments());
      std::cout << "wrote " << rows.size() << " rows to " << knots_out.out << "\n";
    } else if (app.got_subcommand("roots-table")) {
      const auto rows = run_roots_table(roots);
      write_roots_table_csv(roots_out.out, roots, rows, roots_out.extra_comments());
      std::cout << "wrote " << rows.size() << " rows to " << roots_out.out << "\n";
    } else if (app.got_subcommand("crossings")) {
      const auto res = run_crossings(crossings);
      write_crossings_csv(crossings_out.out, crossings, res, crossings_out.extra_comments());
      maybe_write_fits(crossings_out,
                       {{"fixed_semilog", res.fit_fixed}, {"network_semilog", res.fit_net}});
      print_fit("fixed", res.fit_fixed);
      print_fit("network", res.fit_net);
    } else if (app.got_subcommand("survival")) {
      if (survival_variant == "fixed")
        survival.variant = WalkVariant::FixedStep;
      else if (survival_variant == "network")
        survival.variant = WalkVariant::CauchyKnots;
      else
        throw std::invalid_argument("survival.variant: must be fixed|network");
      const auto res = run_survival(survival);
      write_survival_csv(survival_out.out, survival, res, survival_out.extra_comments());
      maybe_write_fits(survival_out, {{"survival_tail", res.tail},
                                      {"cdf_abs_y", res.cdf_y},
                                      {"cdf_abs_yprime", res.cdf_yp},
                                      {"pmf_log2", res.pmf_log2}});
      print_fit("survival_tail", res.tail);
      print_fit("cdf_abs_y", res.cdf_y);
      print_fit("cdf_abs_yprime", res.cdf_yp);
      print_fit("pmf_log2", res.pmf_log2);
      std::cout << "mean crossings: " << res.stats.mean_crossings.mean << " +- "
                << res.stats.mean_crossings.standard_error() << "\n";
    } else if (app.got_subcommand("fudge") || app.got_subcommand("fudge-zeroed")) {
      const bool zeroed = app.got_subcommand("fudge-zeroed");
      FudgeRecipe& rec = zeroed ? fudge_zeroed : fudge;
      OutputOpts& out = zeroed ? fudge_zeroed_out : fudge_out;
      const std::string& coeff = zeroed ? fudge_zeroed_coeff : fudge_coeff;
      if (coeff == "c0")
        rec.mode = zeroed ? FudgeMode::ScaleC0ZeroC1 : FudgeMode::ScaleC0;
      else if (coeff == "c1")
        rec.mode = zeroed ? FudgeMode::ScaleC1ZeroC0 : FudgeMode::ScaleC1;
      else
        throw std::invalid_argument("fudge.coeff: must be c0|c1");
      const auto points = run_fudge(rec);
      write_fudge_csv(out.out, rec, points, out.extra_comments());
      std::cout << "wrote " << points.size() << " factors to " << out.out << "\n";
    } else if (app.got_subcommand("variance")) {
      const auto res = run_variance(variance);
      write_variance_csv(variance_out.out, variance, res, variance_out.extra_comments());
      maybe_write_fits(variance_out, {{"left_power", res.left},
                                      {"right_power", res.right},
                                      {"center_exp", res.center}});
      print_fit("left_power", res.left);
      print_fit("right_power", res.right);
      print_fit("center_exp", res.center);
    } else if (app.got_subcommand("correlation")) {
      const auto res = run_correlation(correlation);
      write_correlation_csv(correlation_out.out, correlation, res,
                            correlation_out.extra_comments());
      std::cout << "wrote " << res.grid.size() * res.grid.size() << " cells to "
                << correlation_out.out << "\n";
    } else if (app.got_subcommand("gradient-dist")) {
      gradient.weights = DistributionSpec::parse(gradient_weights);
      const auto res = run_gradient_dist(gradient);
      write_gradient_dist_csv(gradient_out.out, gradient, res, gradient_out.extra_comments());
      std::cout << "zero mass " << res.zero_mass << ", nonzero var " << res.nonzero_var
                << ", skew " << res.nonzero_skew << ", excess kurtosis "
                << res.nonzero_ex_kurtosis << "\n";
    } else if (app.got_subcommand("order-stats")) {
      if (order_dist == "normal")
        order.dist = OrderStatDist::StandardNormal;
      else if (order_dist == "cauchy")
        order.dist = OrderStatDist::Cauchy;
      else
        throw std::invalid_argument("order-stats.dist: must be normal|cauchy");
      const auto res = run_order_stats(order);
      write_order_stats_csv(order_out.out, order, res, order_out.extra_comments());
      std::cout << "empirical median " << res.empirical_median << ", closed form "
                << res.closed_form << ", binomial z " << res.binomial_z << "\n";
    } else if (app.got_subcommand("decomposition")) {
      const auto res = run_decomposition(decomposition);
      write_decomposition_csv(decomposition_out.out, decomposition, res,
                              decomposition_out.extra_comments());
      for (const auto& tr : res)
        std::cout << "trial " << tr.trial << ": roots " << tr.roots << ", intersections "
                  << tr.intersections << "\n";
    } else if (app.got_subcommand("equivalence-check")) {
      const auto res = run_equivalence(equivalence);
      write_equivalence_csv(equivalence_out.out, equivalence, res,
                            equivalence_out.extra_comments());
      std::cout << "max knot-point discrepancy: " << res.max_abs_err << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace splinewalk
