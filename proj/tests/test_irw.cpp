#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splinewalk/irw.hpp"
#include "splinewalk/pwl.hpp"
#include "test_util.hpp"

using namespace splinewalk;
using namespace testutil;

TEST_CASE("a zero-step walk is constant") {
  Rng rng(1);
  const auto yp = random_walk(50, zero_dist(), 2.5, rng);
  for (double v : yp) CHECK(v == 2.5);
}

TEST_CASE("lattice walk keeps parity") {
  Rng rng(2);
  const auto yp = random_walk(201, rademacher_dist(), 0.0, rng);
  for (std::size_t k = 0; k < yp.size(); ++k) {
    const long v = static_cast<long>(std::llround(yp[k]));
    CHECK((v - static_cast<long>(k)) % 2 == 0);
  }
}

TEST_CASE("normal walk variance grows linearly") {
  const long long trials = 10000;
  const long long n = 100;
  Estimator est;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(mix_seed(33, static_cast<std::uint64_t>(t)));
    const auto yp = random_walk(n, normal_dist(), 0.0, rng);
    est.add(yp.back());
  }
  CHECK(std::abs(est.variance() - static_cast<double>(n)) < 0.05 * static_cast<double>(n));
}

TEST_CASE("integrating a zero walk draws a straight line") {
  const std::vector<double> slopes(11, 1.5);  // y'_k = 1.5 for all k
  const IrwPath p = integrate_fixed(slopes, 0.5, 2.0, 7.0);
  CHECK(p.consistent());
  for (std::size_t k = 0; k < p.xs.size(); ++k)
    CHECK(p.ys[k] == doctest::Approx(7.0 + 1.5 * (p.xs[k] - 2.0)).epsilon(1e-14));
}

TEST_CASE("a single unit step integrates to a ramp") {
  // y'_0 = 0, s_1 = 1, all later steps zero: y_k = k - 1 on a unit grid.
  std::vector<double> slopes(12, 1.0);
  slopes[0] = 0.0;
  const IrwPath p = integrate_fixed(slopes, 1.0, 1.0, 0.0);
  for (std::size_t k = 0; k < p.xs.size(); ++k)
    CHECK(p.ys[k] == doctest::Approx(static_cast<double>(k)).epsilon(1e-15));
}

TEST_CASE("iterative integration equals the closed-form double sum") {
  Rng rng(8);
  const long long n = 200;
  std::vector<double> xs(n), steps(n);
  for (auto& x : xs) x = rng.cauchy();
  std::sort(xs.begin(), xs.end());
  for (auto& s : steps) s = rng.normal();
  const double c1 = rng.normal(), c0 = rng.normal();

  std::vector<double> slopes(static_cast<std::size_t>(n) + 1);
  slopes[0] = c1;
  for (long long j = 0; j < n; ++j)
    slopes[static_cast<std::size_t>(j) + 1] =
        slopes[static_cast<std::size_t>(j)] + steps[static_cast<std::size_t>(j)];
  const IrwPath p = integrate(slopes, xs, c1 * xs[0] + c0);
  CHECK(p.consistent());

  for (std::size_t k = 0; k < p.xs.size(); ++k) {
    double closed = c1 * xs[k] + c0;
    for (std::size_t j = 0; j < k; ++j) closed += steps[j] * (xs[k] - xs[j]);
    CHECK(rel_err(p.ys[k], closed) < 1e-12);
  }
}

TEST_CASE("network path with one knot is the single point of the line") {
  const CanonicalForm cf({1.5}, {2.0}, 3.0, -1.0);
  const IrwPath p = path_from_network(cf);
  REQUIRE(p.xs.size() == 1);
  CHECK(p.ys[0] == 3.0 * 1.5 - 1.0);
  CHECK(p.slopes[0] == 3.0);
  CHECK(p.slopes[1] == 5.0);
}

TEST_CASE("path values equal spline values at every knot") {
  const NetConfig cfg = NetConfig::single_layer(1000, normal_dist(), normal_dist(),
                                                rademacher_dist(), zero_dist());
  const NetworkParams params = sample_network(cfg, 29, 0);
  const CanonicalForm cf = to_canonical(params);
  const IrwPath p = path_from_network(cf);
  const auto direct = cf.eval_sorted(cf.knots());
  double max_err = 0.0;
  for (std::size_t k = 0; k < direct.size(); ++k)
    max_err = std::max(max_err, std::abs(direct[k] - p.ys[k]));
  CHECK(max_err < 1e-9);
}

TEST_CASE("zeroing the line leaves the homogeneous sum") {
  const NetConfig cfg = NetConfig::single_layer(50, normal_dist(), normal_dist(),
                                                rademacher_dist(), zero_dist());
  const CanonicalForm cf = to_canonical(sample_network(cfg, 92, 0)).with_line(0.0, 0.0);
  const IrwPath p = path_from_network(cf);
  for (std::size_t k = 0; k < p.xs.size(); ++k) {
    double expect = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      expect += cf.steps()[j] * std::max(0.0, p.xs[k] - cf.knots()[j]);
    CHECK(rel_err(p.ys[k], expect) < 1e-12);
  }
  CHECK(p.ys[0] == 0.0);
}

TEST_CASE("crossing counts on hand-built paths") {
  IrwPath p;
  p.xs = {0.0, 1.0, 2.0};
  p.slopes = {0.0, 1.0, -2.0, 2.0};
  p.ys = {1.0, 2.0, -3.0};  // consistent with slopes {., 1, -2, .}? not needed for counting
  CHECK(crossing_count(p, false) == 1);
  p.ys = {1.0, -1.0, 1.0};
  CHECK(crossing_count(p, false) == 2);
  p.ys = {1.0, 2.0, 3.0};
  CHECK(crossing_count(p, false) == 0);
}

TEST_CASE("first crossing records the pre-crossing state") {
  IrwPath p;
  p.xs = {0.0, 1.0, 2.0};
  p.slopes = {0.0, 1.0, -5.0, 2.0};
  p.ys = {1.0, 2.0, -3.0};
  const auto fc = first_crossing(p);
  REQUIRE(fc.has_value());
  CHECK(fc->index == 3);
  CHECK(fc->abs_y_prev == 2.0);
  CHECK(fc->abs_yprime_prev == 5.0);

  p.ys = {1.0, 2.0, 3.0};
  CHECK(!first_crossing(p).has_value());
}

TEST_CASE("path crossings agree with the root count of the assembled spline") {
  const NetConfig cfg = NetConfig::single_layer(40, normal_dist(), normal_dist(),
                                                rademacher_dist(), zero_dist());
  for (std::uint64_t t = 0; t < 100; ++t) {
    const CanonicalForm cf = to_canonical(sample_network(cfg, 68, t));
    const IrwPath p = path_from_network(cf);
    CHECK(crossing_count(p, true) == root_count(cf, RootDomain::AllReals));
    CHECK(crossing_count(p, false) == root_count(cf, RootDomain::InteriorKnotSpan));
  }
}

TEST_CASE("crossing parity follows the end signs") {
  const NetConfig cfg = NetConfig::single_layer(30, normal_dist(), normal_dist(),
                                                rademacher_dist(), zero_dist());
  for (std::uint64_t t = 0; t < 100; ++t) {
    const CanonicalForm cf = to_canonical(sample_network(cfg, 75, t));
    const IrwPath p = path_from_network(cf);
    if (p.slopes.front() == 0.0 || p.slopes.back() == 0.0) continue;
    // Sign at -inf is opposite the leading slope; at +inf it follows the
    // trailing slope.
    const int sign_left = p.slopes.front() > 0 ? -1 : 1;
    const int sign_right = p.slopes.back() > 0 ? 1 : -1;
    const long parity = crossing_count(p, true) % 2;
    CHECK(parity == (sign_left != sign_right ? 1 : 0));
  }
}

TEST_CASE("crossing statistics normalize") {
  const CrossingStats st = crossing_statistics(WalkVariant::FixedStep, 512, 400, 99);
  const auto pmf = st.pmf();
  double total = 0.0;
  for (double v : pmf) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  const long long one = 1;
  CHECK(st.survival(std::span<const long long>(&one, 1))[0] == 1.0);
  CHECK(st.mean_crossings.count == 400);
}

TEST_CASE("fixed-step variance grows cubically with the step count") {
  // Var(y_k) = (k^3/3 - k^2/2 + k/6) * dx^2 for unit-variance steps; the
  // dx^2 factor is pinned by running two grids.
  const long long k = 100;
  const long long trials = 20000;
  auto var_at = [&](double dx, std::uint64_t seed) {
    Estimator est;
    for (long long t = 0; t < trials; ++t) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
      double y = 0.0, yp = 0.0;
      for (long long j = 1; j < k; ++j) {
        yp += rng.normal();
        y += dx * yp;
      }
      est.add(y);
    }
    return est.variance();
  };
  const double kk = static_cast<double>(k);
  const double closed = kk * kk * kk / 3.0 - kk * kk / 2.0 + kk / 6.0;
  const double v1 = var_at(1.0, 13579);
  CHECK(std::abs(v1 - closed) < 0.05 * closed);
  const double v2 = var_at(2.0, 24680);
  CHECK(std::abs(v2 / v1 - 4.0) < 0.2);
}

TEST_CASE("plain walk zero counts match the lattice asymptote") {
  // Expected returns to the origin of a unit lattice walk over n tosses:
  // (n+1) * C(n, n/2) * 2^-n - 1. The classical statement indexes the walk
  // by m = n/2 toss pairs, where it reads 2*sqrt((m+1)/pi) - 1; both were
  // cross-checked against a direct sum of the exact return probabilities.
  const long long n = 10000;
  const long long trials = 2000;
  Estimator zeros;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(mix_seed(86420, static_cast<std::uint64_t>(t)));
    long v = 0;
    long count = 0;
    for (long long k = 1; k <= n; ++k) {
      v += rng.rademacher();
      count += v == 0;
    }
    zeros.add(static_cast<double>(count));
  }
  const double m = static_cast<double>(n) / 2.0;
  const double expect = 2.0 * std::sqrt((m + 1.0) / std::numbers::pi) - 1.0;
  CHECK(std::abs(zeros.mean - expect) < 0.05 * expect);
}

TEST_CASE("quantile variance puts about a quarter of the mass on each tail") {
  const QuantileVariance qv = variance_by_quantile(200, 400, 31415);
  long long left = 0, right = 0, total = 0;
  for (std::size_t j = 0; j < qv.center.size(); ++j) {
    total += qv.count[j];
    if (qv.center[j] < -1.0) left += qv.count[j];
    if (qv.center[j] > 1.0) right += qv.count[j];
  }
  CHECK(std::abs(static_cast<double>(left) / static_cast<double>(total) - 0.25) < 0.02);
  CHECK(std::abs(static_cast<double>(right) / static_cast<double>(total) - 0.25) < 0.02);
}

TEST_CASE("correlation surface has a unit diagonal and decays across the origin") {
  const CorrelationSurface cs = shifted_correlation(60, 3000, 2020);
  const std::size_t m = cs.grid.size();
  for (std::size_t i = 0; i < m; ++i) CHECK(cs.corr[i][i] == doctest::Approx(1.0).epsilon(1e-9));

  // Pick x about -3 and x + h about +3: opposite signs, |x| > 1.
  std::size_t i_neg = 0, i_pos = m - 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (cs.grid[i] < -3.0) i_neg = i;
    if (cs.grid[m - 1 - i] > 3.0) i_pos = m - 1 - i;
  }
  CHECK(std::abs(cs.corr[i_neg][i_pos]) < 0.25);

  // Same-side pairs far out stay strongly correlated.
  std::size_t i_far = i_pos;
  while (i_far + 1 < m && cs.grid[i_far + 1] < 30.0) ++i_far;
  CHECK(cs.corr[i_pos][i_far] > 0.7);
}
