#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splinewalk/csv.hpp"
#include "splinewalk/estimator.hpp"
#include "splinewalk/experiments.hpp"
#include "splinewalk/fit.hpp"
#include "splinewalk/rng.hpp"

using namespace splinewalk;

TEST_CASE("estimator basics") {
  Estimator e;
  for (double v : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) e.add(v);
  CHECK(e.count == 8);
  CHECK(e.mean == doctest::Approx(5.0));
  CHECK(e.variance() == doctest::Approx(32.0 / 7.0));
  CHECK(e.halfwidth95() == doctest::Approx(1.96 * e.standard_error()));
}

TEST_CASE("estimator merge is order-insensitive over random partitions") {
  Rng rng(515);
  std::vector<double> data(1000);
  for (auto& v : data) v = rng.normal() * 3.0 + 1.0;
  Estimator whole;
  for (double v : data) whole.add(v);

  for (int rep = 0; rep < 100; ++rep) {
    // Random three-way partition, merged in random order.
    std::vector<Estimator> parts(3);
    for (double v : data) parts[rng.next_u64() % 3].add(v);
    Estimator merged;
    const int order = static_cast<int>(rng.next_u64() % 3);
    for (int i = 0; i < 3; ++i) merged.merge(parts[static_cast<std::size_t>((order + i) % 3)]);
    CHECK(merged.count == whole.count);
    CHECK(std::abs(merged.mean - whole.mean) < 1e-12 * std::max(1.0, std::abs(whole.mean)));
    CHECK(std::abs(merged.variance() - whole.variance()) < 1e-12 * whole.variance());
  }
}

TEST_CASE("exact power law fits to machine precision") {
  std::vector<double> xs, ys;
  for (double x = 1.0; x <= 1e4; x *= 2.0) {
    xs.push_back(x);
    ys.push_back(std::pow(x, -0.25));
  }
  const FitResult f = fit_loglog(xs, ys, {1.0, 1e4});
  CHECK(std::abs(f.slope - (-0.25)) < 1e-9);
  CHECK(f.resid_rms < 1e-12);
}

TEST_CASE("exact logarithmic growth fits to machine precision") {
  std::vector<double> xs, ys;
  for (double x = 4.0; x <= 1e5; x *= 2.0) {
    xs.push_back(x);
    ys.push_back(0.278 * std::log(x) + 2.0);
  }
  const FitResult f = fit_semilog(xs, ys, {4.0, 1e5});
  CHECK(std::abs(f.slope - 0.278) < 1e-12);
  CHECK(std::abs(f.intercept - 2.0) < 1e-12);
}

TEST_CASE("fits reject degenerate windows") {
  std::vector<double> xs = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> ys = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(fit_loglog(xs, ys, {100.0, 1000.0}), std::invalid_argument);
}

TEST_CASE("normal quantile inverts the CDF") {
  for (double p : {1e-6, 0.001, 0.025, 0.31, 0.5, 0.77, 0.975, 0.999, 1.0 - 1e-6}) {
    const double z = normal_quantile(p);
    const double back = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    CHECK(std::abs(back - p) < 1e-9);
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("csv numbers round-trip binary64") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.next_u64() % 64) - 32);
    CHECK(std::stod(csv_num(v)) == v);
  }
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("with,comma") == "\"with,comma\"");
  CHECK(csv_field("with\"quote") == "\"with\"\"quote\"");
}

TEST_CASE("cauchy minimum median matches its closed form") {
  OrderStatsRecipe r;
  r.dist = OrderStatDist::Cauchy;
  r.n = 100;
  r.trials = 20000;
  r.seed = 27;
  const OrderStatsResult res = run_order_stats(r);
  CHECK(std::abs(res.binomial_z) < 3.0);
  // Sanity on the closed form itself: the minimum of 100 standard Cauchy
  // draws has median tan(pi*(1/2 - 2^(-1/100))) (about -46).
  CHECK(res.closed_form == doctest::Approx(std::tan(std::numbers::pi *
                                                    (0.5 - std::pow(2.0, -0.01))))
                               .epsilon(1e-12));
}

TEST_CASE("single cauchy draw has median zero") {
  OrderStatsRecipe r;
  r.dist = OrderStatDist::Cauchy;
  r.n = 1;
  r.trials = 20000;
  r.seed = 28;
  const OrderStatsResult res = run_order_stats(r);
  CHECK(res.closed_form == doctest::Approx(0.0));
  CHECK(std::abs(res.binomial_z) < 3.0);
  CHECK(std::abs(res.empirical_median) < 0.05);
}

TEST_CASE("normal minimum median sits near the root-log asymptote") {
  OrderStatsRecipe r;
  r.dist = OrderStatDist::StandardNormal;
  r.n = 10000;
  r.trials = 4000;
  r.seed = 29;
  const OrderStatsResult res = run_order_stats(r);
  CHECK(std::abs(res.binomial_z) < 3.0);
  const double leading = -std::sqrt(2.0 * std::log(static_cast<double>(r.n)));
  CHECK(std::abs(res.empirical_median - leading) / std::abs(leading) < 0.15);
}

TEST_CASE("decomposition cross-check: intersections equal roots") {
  DecompositionRecipe r;
  r.n = 500;
  r.trials = 40;
  r.seed = 29;
  const auto traces = run_decomposition(r);
  bool seen0 = false, seen1 = false, seen3 = false;
  for (const auto& tr : traces) {
    CHECK(tr.intersections == tr.roots);
    seen0 |= tr.roots == 0;
    seen1 |= tr.roots == 1;
    seen3 |= tr.roots == 3;
  }
  CHECK(seen0);
  CHECK(seen1);
  CHECK(seen3);
}

TEST_CASE("knots recipe emits one row per trial with exact counts for one layer") {
  KnotsRecipe r;
  r.layers = {1};
  r.widths = {50};
  r.trials = 100;
  r.seed = 7;
  const auto rows = run_knots(r);
  REQUIRE(rows.size() == 100);
  for (const auto& row : rows) {
    CHECK(row.m == 50);
    CHECK(row.norm_err == 0.0);
  }
}

TEST_CASE("recipes validate their configuration") {
  KnotsRecipe bad;
  bad.trials = 0;
  CHECK_THROWS_WITH_AS(static_cast<void>(run_knots(bad)), "knots.trials: must be >= 1",
                       std::invalid_argument);
  RootsTableRecipe bad2;
  bad2.n = 0;
  CHECK_THROWS_AS(static_cast<void>(run_roots_table(bad2)), std::invalid_argument);
}

TEST_CASE("fudge factor zero counts the walk-only roots") {
  FudgeRecipe r;
  r.mode = FudgeMode::ScaleC1ZeroC0;
  r.factors = {0.0};
  r.n = 200;
  r.trials = 300;
  r.seed = 44;
  // Both coefficients zeroed: counting homogeneous-walk crossings on all of
  // R; with ends flattened to zero slope... the left end is flat (slope 0),
  // so only interior and right-end crossings remain. Mean should be O(1).
  const auto pts = run_fudge(r);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].mean_roots.mean > 0.2);
  CHECK(pts[0].mean_roots.mean < 3.0);
}

TEST_CASE("json fit summary is well-formed") {
  const std::string path = "/tmp/splinewalk_test_fits.json";
  FitResult f;
  f.slope = -0.25;
  f.intercept = 1.5;
  f.window = {1.0, 100.0};
  f.points = 12;
  write_fits_json(path, {{"demo", f}});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("\"demo\"") != std::string::npos);
  CHECK(ss.str().find("-0.25") != std::string::npos);
  std::remove(path.c_str());
}
