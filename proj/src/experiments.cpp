#include "splinewalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "splinewalk/csv.hpp"
#include "splinewalk/parallel.hpp"
#include "splinewalk/version.hpp"

namespace splinewalk {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += csv_num(v[i]);
  }
  return s;
}

void write_header(CsvFile& csv, const std::string& spec, std::uint64_t seed,
                  const std::vector<std::string>& extra) {
  csv.comment(std::string("splinewalk ") + kVersion);
  csv.comment("spec: " + spec);
  csv.comment("master_seed: " + std::to_string(seed));
  for (const auto& line : extra) csv.comment(line);
}

// Log-spaced integer grid, deduplicated, within [lo, hi].
std::vector<long long> log_spaced_longs(long long lo, long long hi, int per_decade) {
  std::vector<long long> out;
  const double step = 1.0 / per_decade;
  for (double e = std::log10(static_cast<double>(lo));; e += step) {
    long long k = static_cast<long long>(std::llround(std::pow(10.0, e)));
    if (k < lo) k = lo;
    if (k > hi) break;
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  if (out.empty() || out.back() != hi) out.push_back(hi);
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const double step = 1.0 / per_decade;
  for (double e = std::log10(lo); e <= std::log10(hi) + 1e-12; e += step)
    out.push_back(std::pow(10.0, e));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- knots --

std::string KnotsRecipe::spec_string() const {
  std::ostringstream os;
  os << "knots layers=" << join_ints(layers) << " widths=" << join_ints(widths)
     << " trials=" << trials << " dist=" << dist.name() << " seed=" << seed;
  return os.str();
}

std::vector<KnotsRow> run_knots(const KnotsRecipe& r) {
  if (r.trials < 1) throw std::invalid_argument("knots.trials: must be >= 1");
  if (r.layers.empty()) throw std::invalid_argument("knots.layers: must be non-empty");
  if (r.widths.empty()) throw std::invalid_argument("knots.widths: must be non-empty");

  std::vector<KnotsRow> rows;
  std::size_t grid_index = 0;
  for (int l : r.layers) {
    for (int n : r.widths) {
      const NetConfig cfg = NetConfig::dense(l, n, r.dist);
      const std::uint64_t sub = mix_seed(r.seed, grid_index++);

      struct Part {
        std::vector<KnotsRow> rows;
        void merge(const Part& o) { rows.insert(rows.end(), o.rows.begin(), o.rows.end()); }
      };
      Part part = run_blocked<Part>(
          r.trials, default_block(r.trials), [&](long long lo, long long hi, Part& p) {
            for (long long t = lo; t < hi; ++t) {
              const NetworkParams params = sample_network(cfg, sub, static_cast<std::uint64_t>(t));
              const long m = network_knot_count(params);
              const double nl = static_cast<double>(n) * l;
              p.rows.push_back({l, n, t, m, (static_cast<double>(m) - nl) / nl});
            }
          });
      rows.insert(rows.end(), part.rows.begin(), part.rows.end());
    }
  }
  return rows;
}

void write_knots_csv(const std::string& path, const KnotsRecipe& r,
                     const std::vector<KnotsRow>& rows,
                     const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"l", "n", "trial", "m", "normalized_error"});
  for (const auto& row : rows)
    csv.row({csv_num(row.l), csv_num(row.n), csv_num(row.trial), csv_num(row.m),
             csv_num(row.norm_err)});
}

// ---------------------------------------------------------- roots table --

std::string RootsTableRecipe::spec_string() const {
  std::ostringstream os;
  os << "roots-table n=" << n << " trials=" << trials << " seed=" << seed;
  return os.str();
}

const std::vector<std::array<DistributionSpec, 4>>& roots_table_combos() {
  static const auto N = normal_dist();
  static const auto U = uniform_dist();
  static const auto R = rademacher_dist();
  static const auto Z = zero_dist();
  static const std::vector<std::array<DistributionSpec, 4>> combos = {
      {N, N, N, N}, {N, N, N, Z}, {U, U, U, U}, {U, U, U, Z}, {N, N, R, Z}, {N, N, R, N},
      {U, U, R, Z}, {U, U, R, U}, {N, U, R, Z}, {U, N, R, Z}, {R, N, N, Z}, {R, U, U, Z},
      {N, R, N, Z}, {U, R, U, Z}, {N, R, R, Z}, {U, R, R, Z}, {R, N, R, Z}, {R, U, R, Z}};
  return combos;
}

std::vector<RootsTableRow> run_roots_table(const RootsTableRecipe& r) {
  if (r.n < 1) throw std::invalid_argument("roots-table.n: must be >= 1");
  if (r.trials < 2) throw std::invalid_argument("roots-table.trials: must be >= 2");

  const auto& combos = roots_table_combos();
  std::vector<RootsTableRow> rows(combos.size());

  for (std::size_t c = 0; c < combos.size(); ++c) {
    rows[c].dists = combos[c];
    const NetConfig cfg = NetConfig::single_layer(static_cast<int>(r.n), combos[c][0],
                                                  combos[c][1], combos[c][2], combos[c][3]);
    // Independent trial sets for the two domains.
    for (int domain = 0; domain < 2; ++domain) {
      const std::uint64_t sub = mix_seed(r.seed, 2 * c + static_cast<std::size_t>(domain));
      struct Acc {
        Estimator est;
        void merge(const Acc& o) { est.merge(o.est); }
      };
      const Acc acc = run_blocked<Acc>(
          r.trials, default_block(r.trials), [&](long long lo, long long hi, Acc& a) {
            for (long long t = lo; t < hi; ++t) {
              const NetworkParams p = sample_network(cfg, sub, static_cast<std::uint64_t>(t));
              const CanonicalForm cf = to_canonical(p);
              const long roots = root_count(
                  cf, domain == 0 ? RootDomain::AllReals : RootDomain::InteriorKnotSpan);
              a.est.add(static_cast<double>(roots));
            }
          });
      (domain == 0 ? rows[c].roots_all : rows[c].roots_span) = acc.est;
    }
  }
  return rows;
}

void write_roots_table_csv(const std::string& path, const RootsTableRecipe& r,
                           const std::vector<RootsTableRow>& rows,
                           const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"w1", "b1", "w2", "b2", "n", "trials", "mean_R", "se_R", "mean_span", "se_span"});
  for (const auto& row : rows)
    csv.row({row.dists[0].name(), row.dists[1].name(), row.dists[2].name(),
             row.dists[3].name(), csv_num(r.n), csv_num(r.trials),
             csv_num(row.roots_all.mean), csv_num(row.roots_all.standard_error()),
             csv_num(row.roots_span.mean), csv_num(row.roots_span.standard_error())});
}

// ------------------------------------------------------------ crossings --

std::vector<long long> CrossingsRecipe::sizes() const {
  std::vector<long long> out;
  for (long long n = min_steps; n <= max_steps; n *= 2) out.push_back(n);
  return out;
}

std::vector<long long> CrossingsRecipe::trials_per_size() const {
  std::vector<long long> out;
  for (long long n : sizes()) out.push_back(std::max(base_trials, (1LL << 20) / n));
  return out;
}

std::string CrossingsRecipe::spec_string() const {
  std::ostringstream os;
  os << "crossings min-steps=" << min_steps << " max-steps=" << max_steps
     << " trials=" << base_trials << " window-fixed=[" << window_fixed.lo << ","
     << window_fixed.hi << "] window-net=[" << window_net.lo << "," << window_net.hi
     << "] seed=" << seed;
  return os.str();
}

CrossingsResult run_crossings(const CrossingsRecipe& r) {
  if (r.min_steps < 2) throw std::invalid_argument("crossings.min-steps: must be >= 2");
  if (r.max_steps < r.min_steps)
    throw std::invalid_argument("crossings.max-steps: must be >= min-steps");
  if (r.base_trials < 2) throw std::invalid_argument("crossings.trials: must be >= 2");

  const auto sizes = r.sizes();
  const auto trials = r.trials_per_size();
  CrossingsResult res;
  res.fixed = crossing_curve(WalkVariant::FixedStep, sizes, trials, mix_seed(r.seed, 0));
  res.net = crossing_curve(WalkVariant::CauchyKnots, sizes, trials, mix_seed(r.seed, 1));

  std::vector<double> ns(sizes.begin(), sizes.end());
  std::vector<double> mf(sizes.size()), mn(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    mf[i] = res.fixed[i].mean.mean;
    mn[i] = res.net[i].mean.mean;
  }
  res.fit_fixed = fit_semilog(ns, mf, r.window_fixed);
  res.fit_net = fit_semilog(ns, mn, r.window_net);
  return res;
}

void write_crossings_csv(const std::string& path, const CrossingsRecipe& r,
                         const CrossingsResult& res,
                         const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"variant", "kind", "n", "trials", "mean_crossings", "se", "slope", "intercept",
           "resid_rms", "window_lo", "window_hi"});
  auto points = [&](const char* name, const std::vector<CrossingCurvePoint>& pts) {
    for (const auto& p : pts)
      csv.row({name, "point", csv_num(p.n), csv_num(p.mean.count), csv_num(p.mean.mean),
               csv_num(p.mean.standard_error()), "", "", "", "", ""});
  };
  auto fitrow = [&](const char* name, const FitResult& f) {
    csv.row({name, "fit", "", "", "", "", csv_num(f.slope), csv_num(f.intercept),
             csv_num(f.resid_rms), csv_num(f.window.lo), csv_num(f.window.hi)});
  };
  points("fixed", res.fixed);
  points("network", res.net);
  fitrow("fixed", res.fit_fixed);
  fitrow("network", res.fit_net);
}

// ------------------------------------------------------------- survival --

std::string SurvivalRecipe::spec_string() const {
  std::ostringstream os;
  os << "survival variant=" << (variant == WalkVariant::FixedStep ? "fixed" : "network")
     << " steps=" << steps << " trials=" << trials << " seed=" << seed;
  return os.str();
}

SurvivalResult run_survival(const SurvivalRecipe& r) {
  if (r.steps < 2) throw std::invalid_argument("survival.steps: must be >= 2");
  if (r.trials < 2) throw std::invalid_argument("survival.trials: must be >= 2");

  SurvivalResult res;
  res.stats = crossing_statistics(r.variant, r.steps, r.trials, r.seed);

  {
    const auto ks = log_spaced_longs(2, r.steps, 20);
    const auto sv = res.stats.survival(ks);
    std::vector<double> kd(ks.begin(), ks.end());
    res.tail = fit_loglog(kd, sv, r.tail_window);
  }
  auto cdf_fit = [](const std::vector<double>& sorted, FitWindow w) {
    const auto vs = log_spaced(w.lo, w.hi, 20);
    std::vector<double> cdf(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), vs[i]);
      cdf[i] = static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    }
    return fit_loglog(vs, cdf, w);
  };
  res.cdf_y = cdf_fit(res.stats.pre_abs_y, r.cdf_y_window);
  res.cdf_yp = cdf_fit(res.stats.pre_abs_yprime, r.cdf_yp_window);

  {
    const auto pmf = res.stats.pmf();
    std::vector<double> ks, lp;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      const double kd = static_cast<double>(k);
      if (pmf[k] > 0.0 && kd >= r.pmf_window.lo && kd <= r.pmf_window.hi) {
        ks.push_back(kd);
        lp.push_back(std::log2(pmf[k]));
      }
    }
    res.pmf_log2 = fit_linear(ks, lp);
    res.pmf_log2.window = r.pmf_window;
  }
  return res;
}

void write_survival_csv(const std::string& path, const SurvivalRecipe& r,
                        const SurvivalResult& res,
                        const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.comment("mean_crossings: " + csv_num(res.stats.mean_crossings.mean) + " se " +
              csv_num(res.stats.mean_crossings.standard_error()));
  csv.row({"section", "x", "y"});

  const auto ks = log_spaced_longs(2, r.steps, 20);
  const auto sv = res.stats.survival(ks);
  for (std::size_t i = 0; i < ks.size(); ++i)
    csv.row({"survival", csv_num(ks[i]), csv_num(sv[i])});

  auto cdf_rows = [&](const char* name, const std::vector<double>& sorted) {
    if (sorted.empty()) return;
    for (double v : log_spaced(1e-4, 100.0, 10)) {
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), v);
      csv.row({name, csv_num(v),
               csv_num(static_cast<double>(it - sorted.begin()) /
                       static_cast<double>(sorted.size()))});
    }
  };
  cdf_rows("cdf_abs_y", res.stats.pre_abs_y);
  cdf_rows("cdf_abs_yprime", res.stats.pre_abs_yprime);

  const auto pmf = res.stats.pmf();
  for (std::size_t k = 0; k < pmf.size(); ++k)
    csv.row({"pmf", csv_num(static_cast<long long>(k)), csv_num(pmf[k])});

  csv.row({"mean_crossings", "", csv_num(res.stats.mean_crossings.mean)});
}

// ---------------------------------------------------------------- fudge --

std::string fudge_mode_name(FudgeMode m) {
  switch (m) {
    case FudgeMode::ScaleC0: return "scale-c0";
    case FudgeMode::ScaleC1: return "scale-c1";
    case FudgeMode::ScaleC0ZeroC1: return "scale-c0-zero-c1";
    case FudgeMode::ScaleC1ZeroC0: return "scale-c1-zero-c0";
  }
  return "?";
}

std::vector<double> FudgeRecipe::resolved_factors() const {
  if (!factors.empty()) return factors;
  std::vector<double> out;
  for (int e = -20; e <= 20; e += 4) out.push_back(std::ldexp(1.0, e));
  return out;
}

std::string FudgeRecipe::spec_string() const {
  std::ostringstream os;
  os << "fudge mode=" << fudge_mode_name(mode) << " factors=" << join_doubles(resolved_factors())
     << " n=" << n << " trials=" << trials << " seed=" << seed;
  return os.str();
}

std::vector<FudgePoint> run_fudge(const FudgeRecipe& r) {
  if (r.n < 1) throw std::invalid_argument("fudge.n: must be >= 1");
  if (r.trials < 2) throw std::invalid_argument("fudge.trials: must be >= 2");
  const auto factors = r.resolved_factors();
  for (double f : factors)
    if (f < 0.0) throw std::invalid_argument("fudge.factors: must be >= 0");

  const NetConfig cfg = NetConfig::single_layer(static_cast<int>(r.n), normal_dist(),
                                                normal_dist(), rademacher_dist(), zero_dist());
  std::vector<FudgePoint> out(factors.size());
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    const double factor = factors[fi];
    const std::uint64_t sub = mix_seed(r.seed, fi);
    struct Acc {
      Estimator est;
      void merge(const Acc& o) { est.merge(o.est); }
    };
    const Acc acc = run_blocked<Acc>(
        r.trials, default_block(r.trials), [&](long long lo, long long hi, Acc& a) {
          for (long long t = lo; t < hi; ++t) {
            const NetworkParams p = sample_network(cfg, sub, static_cast<std::uint64_t>(t));
            const CanonicalForm cf = to_canonical(p);
            double c0 = cf.c0(), c1 = cf.c1();
            switch (r.mode) {
              case FudgeMode::ScaleC0: c0 *= factor; break;
              case FudgeMode::ScaleC1: c1 *= factor; break;
              case FudgeMode::ScaleC0ZeroC1:
                c0 *= factor;
                c1 = 0.0;
                break;
              case FudgeMode::ScaleC1ZeroC0:
                c1 *= factor;
                c0 = 0.0;
                break;
            }
            a.est.add(static_cast<double>(root_count(cf.with_line(c1, c0), RootDomain::AllReals)));
          }
        });
    out[fi] = {factor, acc.est};
  }
  return out;
}

void write_fudge_csv(const std::string& path, const FudgeRecipe& r,
                     const std::vector<FudgePoint>& points,
                     const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"mode", "factor", "n", "trials", "mean_roots", "se"});
  for (const auto& p : points)
    csv.row({fudge_mode_name(r.mode), csv_num(p.factor), csv_num(r.n), csv_num(r.trials),
             csv_num(p.mean_roots.mean), csv_num(p.mean_roots.standard_error())});
}

// ------------------------------------------------------------- variance --

std::string VarianceRecipe::spec_string() const {
  std::ostringstream os;
  os << "variance n=" << n << " trials=" << trials << " side-window=[" << side_window.lo << ","
     << side_window.hi << "] center-window=[" << center_window.lo << "," << center_window.hi
     << "] seed=" << seed;
  return os.str();
}

VarianceResult run_variance(const VarianceRecipe& r) {
  if (r.n < 2) throw std::invalid_argument("variance.n: must be >= 2");
  if (r.trials < 2) throw std::invalid_argument("variance.trials: must be >= 2");

  VarianceResult res;
  res.qv = variance_by_quantile(r.n, r.trials, r.seed);

  std::vector<double> lx, lv, rx, rv, cx, cv;
  for (std::size_t j = 0; j < res.qv.center.size(); ++j) {
    const double x = res.qv.center[j];
    const double v = res.qv.variance[j];
    if (res.qv.count[j] < 8 || v <= 0.0) continue;
    if (x < 0.0) {
      lx.push_back(-x);
      lv.push_back(v);
    } else {
      rx.push_back(x);
      rv.push_back(v);
    }
    if (x >= r.center_window.lo && x <= r.center_window.hi) {
      cx.push_back(x);
      cv.push_back(std::log(v));
    }
  }
  res.left = fit_loglog(lx, lv, r.side_window);
  res.right = fit_loglog(rx, rv, r.side_window);
  res.center = fit_linear(cx, cv);
  res.center.window = r.center_window;
  return res;
}

void write_variance_csv(const std::string& path, const VarianceRecipe& r,
                        const VarianceResult& res,
                        const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"cell", "x_center", "count", "variance"});
  for (std::size_t j = 0; j < res.qv.center.size(); ++j)
    csv.row({csv_num(static_cast<long long>(j)), csv_num(res.qv.center[j]),
             csv_num(res.qv.count[j]), csv_num(res.qv.variance[j])});
}

// ---------------------------------------------------------- correlation --

std::string CorrelationRecipe::spec_string() const {
  std::ostringstream os;
  os << "correlation n=" << n << " trials=" << trials << " seed=" << seed;
  return os.str();
}

CorrelationSurface run_correlation(const CorrelationRecipe& r) {
  if (r.n < 2) throw std::invalid_argument("correlation.n: must be >= 2");
  if (r.trials < 2) throw std::invalid_argument("correlation.trials: must be >= 2");
  return shifted_correlation(r.n, r.trials, r.seed);
}

void write_correlation_csv(const std::string& path, const CorrelationRecipe& r,
                           const CorrelationSurface& res,
                           const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"x", "h", "corr"});
  for (std::size_t i = 0; i < res.grid.size(); ++i)
    for (std::size_t j = 0; j < res.grid.size(); ++j)
      csv.row({csv_num(res.grid[i]), csv_num(res.grid[j] - res.grid[i]),
               csv_num(res.corr[i][j])});
}

// -------------------------------------------------------- gradient dist --

std::string GradientDistRecipe::spec_string() const {
  std::ostringstream os;
  os << "gradient-dist layers=" << layers << " width=" << width << " layer=" << layer_i
     << " xs=" << join_doubles(xs) << " trials=" << trials << " weights=" << weights.name()
     << " seed=" << seed;
  return os.str();
}

GradientDistribution run_gradient_dist(const GradientDistRecipe& r) {
  if (r.layer_i < 1 || r.layer_i > r.layers)
    throw std::invalid_argument("gradient-dist.layer: must be within 1..layers");
  NetConfig cfg = NetConfig::dense(r.layers, r.width, r.weights);
  cfg.b_input = cfg.b_hidden = cfg.b_output = zero_dist();
  return gradient_distribution(cfg, r.layer_i, r.xs, r.trials, r.seed);
}

void write_gradient_dist_csv(const std::string& path, const GradientDistRecipe& r,
                             const GradientDistribution& res,
                             const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"layer", "trials", "samples", "zero_mass", "nonzero_mean", "nonzero_var",
           "nonzero_skew", "nonzero_ex_kurtosis"});
  csv.row({csv_num(r.layer_i), csv_num(r.trials), csv_num(res.total), csv_num(res.zero_mass),
           csv_num(res.nonzero_mean), csv_num(res.nonzero_var), csv_num(res.nonzero_skew),
           csv_num(res.nonzero_ex_kurtosis)});
}

// ------------------------------------------------------- order statistics --

std::string OrderStatsRecipe::spec_string() const {
  std::ostringstream os;
  os << "order-stats dist=" << (dist == OrderStatDist::Cauchy ? "cauchy" : "normal")
     << " n=" << n << " trials=" << trials << " seed=" << seed;
  return os.str();
}

OrderStatsResult run_order_stats(const OrderStatsRecipe& r) {
  if (r.n < 1) throw std::invalid_argument("order-stats.n: must be >= 1");
  if (r.trials < 2) throw std::invalid_argument("order-stats.trials: must be >= 2");

  // Median of the sample minimum: the CDF of the minimum is
  // 1 - (1 - F(x))^n, so the median sits at F^{-1}(1 - 2^(-1/n)).
  const double p = -std::expm1(-std::numbers::ln2 / static_cast<double>(r.n));
  OrderStatsResult res;
  res.trials = r.trials;
  res.closed_form = r.dist == OrderStatDist::Cauchy ? cauchy_quantile(p) : normal_quantile(p);

  struct Acc {
    std::vector<double> mins;
    long long below = 0;
    void merge(const Acc& o) {
      mins.insert(mins.end(), o.mins.begin(), o.mins.end());
      below += o.below;
    }
  };
  const double closed = res.closed_form;
  const Acc acc = run_blocked<Acc>(
      r.trials, default_block(r.trials), [&](long long lo, long long hi, Acc& a) {
        for (long long t = lo; t < hi; ++t) {
          Rng rng(mix_seed(r.seed, static_cast<std::uint64_t>(t)));
          double mn = std::numeric_limits<double>::infinity();
          for (long long i = 0; i < r.n; ++i) {
            const double v =
                r.dist == OrderStatDist::Cauchy ? rng.cauchy() : rng.normal();
            mn = std::min(mn, v);
          }
          a.mins.push_back(mn);
          if (mn < closed) ++a.below;
        }
      });

  std::vector<double> mins = acc.mins;
  std::nth_element(mins.begin(), mins.begin() + mins.size() / 2, mins.end());
  res.empirical_median = mins[mins.size() / 2];
  const double t = static_cast<double>(r.trials);
  res.binomial_z = (static_cast<double>(acc.below) - 0.5 * t) / std::sqrt(0.25 * t);
  return res;
}

void write_order_stats_csv(const std::string& path, const OrderStatsRecipe& r,
                           const OrderStatsResult& res,
                           const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.row({"dist", "n", "trials", "empirical_median", "closed_form_median", "binomial_z"});
  csv.row({r.dist == OrderStatDist::Cauchy ? "cauchy" : "normal", csv_num(r.n),
           csv_num(r.trials), csv_num(res.empirical_median), csv_num(res.closed_form),
           csv_num(res.binomial_z)});
}

// -------------------------------------------------------- decomposition --

std::string DecompositionRecipe::spec_string() const {
  std::ostringstream os;
  os << "decomposition n=" << n << " trials=" << trials << " max-samples=" << max_samples
     << " seed=" << seed;
  return os.str();
}

std::vector<DecompositionTrace> run_decomposition(const DecompositionRecipe& r) {
  if (r.n < 1) throw std::invalid_argument("decomposition.n: must be >= 1");
  if (r.trials < 1) throw std::invalid_argument("decomposition.trials: must be >= 1");

  const NetConfig cfg = NetConfig::single_layer(static_cast<int>(r.n), normal_dist(),
                                                normal_dist(), rademacher_dist(), zero_dist());
  std::vector<DecompositionTrace> traces;
  for (long long t = 0; t < r.trials; ++t) {
    const NetworkParams p = sample_network(cfg, r.seed, static_cast<std::uint64_t>(t));
    const CanonicalForm cf = to_canonical(p);
    const CanonicalForm walk = cf.with_line(0.0, 0.0);
    const auto xs = cf.knots();
    const auto fs = walk.values_at_knots();

    DecompositionTrace tr;
    tr.trial = static_cast<std::uint64_t>(t);
    tr.c0 = cf.c0();
    tr.c1 = cf.c1();
    tr.roots = root_count(cf, RootDomain::AllReals);

    // Intersections of the homogeneous walk with the line -c1 x - c0,
    // through the decomposition arithmetic rather than root counting.
    {
      long hits = 0;
      int last = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double diff = fs[k] - (-tr.c1 * xs[k] - tr.c0);
        const int s = sign_of(diff);
        if (s == 0) continue;
        if (last != 0 && s != last) ++hits;
        last = s;
      }
      const double d1 = fs.front() - (-tr.c1 * xs.front() - tr.c0);
      if (tr.c1 != 0.0 && d1 != 0.0 && sign_of(d1) == sign_of(tr.c1)) ++hits;
      double slope_final = tr.c1;
      for (double s : cf.steps()) slope_final += s;
      const double dn = fs.back() - (-tr.c1 * xs.back() - tr.c0);
      if (slope_final != 0.0 && dn != 0.0 && sign_of(dn) != sign_of(slope_final)) ++hits;
      tr.intersections = hits;
    }

    const std::size_t stride =
        std::max<std::size_t>(1, xs.size() / static_cast<std::size_t>(r.max_samples));
    for (std::size_t k = 0; k < xs.size(); k += stride) {
      tr.xs.push_back(xs[k]);
      tr.walk.push_back(fs[k]);
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

void write_decomposition_csv(const std::string& path, const DecompositionRecipe& r,
                             const std::vector<DecompositionTrace>& res,
                             const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  for (const auto& tr : res)
    csv.comment("trial " + std::to_string(tr.trial) + ": c0=" + csv_num(tr.c0) +
                " c1=" + csv_num(tr.c1) + " roots=" + csv_num(tr.roots) +
                " intersections=" + csv_num(tr.intersections));
  csv.row({"trial", "x", "walk", "line"});
  for (const auto& tr : res)
    for (std::size_t k = 0; k < tr.xs.size(); ++k)
      csv.row({csv_num(static_cast<long long>(tr.trial)), csv_num(tr.xs[k]),
               csv_num(tr.walk[k]), csv_num(-tr.c1 * tr.xs[k] - tr.c0)});
}

// -------------------------------------------------- equivalence check --

std::string EquivalenceRecipe::spec_string() const {
  std::ostringstream os;
  os << "equivalence-check seeds=" << seeds << " n=" << n << " seed=" << seed;
  return os.str();
}

EquivalenceResult run_equivalence(const EquivalenceRecipe& r) {
  if (r.seeds < 1) throw std::invalid_argument("equivalence-check.seeds: must be >= 1");
  if (r.n < 1) throw std::invalid_argument("equivalence-check.n: must be >= 1");

  const NetConfig cfg = NetConfig::single_layer(static_cast<int>(r.n), normal_dist(),
                                                normal_dist(), rademacher_dist(), zero_dist());
  struct Part {
    std::vector<EquivalenceRow> rows;
    void merge(const Part& o) { rows.insert(rows.end(), o.rows.begin(), o.rows.end()); }
  };
  Part part = run_blocked<Part>(
      r.seeds, default_block(r.seeds), [&](long long lo, long long hi, Part& p) {
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams params = sample_network(cfg, r.seed, static_cast<std::uint64_t>(t));
          const CanonicalForm cf = to_canonical(params);
          const IrwPath path = path_from_network(cf);
          const std::vector<double> direct = cf.eval_sorted(cf.knots());
          double err = 0.0;
          for (std::size_t k = 0; k < direct.size(); ++k)
            err = std::max(err, std::abs(direct[k] - path.ys[k]));
          p.rows.push_back({static_cast<std::uint64_t>(t), err});
        }
      });

  EquivalenceResult res;
  res.rows = std::move(part.rows);
  for (const auto& row : res.rows) res.max_abs_err = std::max(res.max_abs_err, row.max_abs_err);
  return res;
}

void write_equivalence_csv(const std::string& path, const EquivalenceRecipe& r,
                           const EquivalenceResult& res,
                           const std::vector<std::string>& extra_comments) {
  CsvFile csv(path);
  write_header(csv, r.spec_string(), r.seed, extra_comments);
  csv.comment("max_abs_err: " + csv_num(res.max_abs_err));
  csv.row({"trial", "n", "max_discrepancy"});
  for (const auto& row : res.rows)
    csv.row({csv_num(static_cast<long long>(row.trial)), csv_num(r.n),
             csv_num(row.max_abs_err)});
}

// ------------------------------------------------------------------ json --

void write_fits_json(const std::string& path,
                     const std::vector<std::pair<std::string, FitResult>>& fits) {
  nlohmann::json j;
  j["tool"] = std::string("splinewalk ") + kVersion;
  for (const auto& [name, f] : fits) {
    j["fits"][name] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"resid_rms", f.resid_rms},
                       {"window", {f.window.lo, f.window.hi}},
                       {"points", f.points}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace splinewalk
