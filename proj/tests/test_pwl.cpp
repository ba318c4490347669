#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splinewalk/canonical.hpp"
#include "splinewalk/pwl.hpp"
#include "test_util.hpp"

using namespace splinewalk;
using namespace testutil;

TEST_CASE("eval of the unit rectifier") {
  const PwlFunction s = PwlFunction::relu_unit();
  CHECK(s(2.0) == 2.0);
  CHECK(s(-3.0) == 0.0);
  CHECK(s(0.0) == 0.0);
  CHECK(s.knot_count() == 1);
}

TEST_CASE("eval matches direct summation on a small canonical spline") {
  // Assemble the canonical form of a 3-neuron net as a PwlFunction and
  // compare against term-by-term evaluation of the same expression.
  const NetConfig cfg = NetConfig::single_layer(3, normal_dist(), normal_dist(),
                                                normal_dist(), normal_dist());
  const NetworkParams p = sample_network(cfg, 42, 0);
  const CanonicalForm cf = to_canonical(p);

  std::vector<PwlFunction> units;
  std::vector<double> weights;
  for (long j = 0; j < cf.size(); ++j) {
    units.push_back(PwlFunction::from_breakpoints({cf.knots()[static_cast<std::size_t>(j)]}, 0.0,
                                                  {0.0, 1.0}));
    weights.push_back(cf.steps()[static_cast<std::size_t>(j)]);
  }
  units.push_back(PwlFunction::line(cf.c1(), cf.c0()));
  weights.push_back(1.0);
  const PwlFunction f = affine_combine(units, weights, 0.0);

  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const double x = 10.0 * rng.uniform_sym();
    const double direct = direct_canonical_eval(
        {cf.knots().begin(), cf.knots().end()}, {cf.steps().begin(), cf.steps().end()},
        cf.c1(), cf.c0(), x);
    CHECK(rel_err(f(x), direct) < 1e-12);
  }
}

TEST_CASE("affine_combine identity") {
  const PwlFunction s = PwlFunction::relu_unit();
  const double w = 1.0;
  const PwlFunction g = affine_combine(std::span<const PwlFunction>(&s, 1),
                                       std::span<const double>(&w, 1), 0.0);
  CHECK(g.knot_count() == 1);
  CHECK(g(3.5) == 3.5);
  CHECK(g(-1.0) == 0.0);
}

TEST_CASE("slope cancellation prunes the knot: relu(x) - relu(-x) = x") {
  const PwlFunction a = PwlFunction::relu_unit();
  const PwlFunction b = relu(PwlFunction::line(-1.0, 0.0));  // relu(-x)
  const std::vector<PwlFunction> fs = {a, b};
  const std::vector<double> w = {1.0, -1.0};
  const PwlFunction g = affine_combine(fs, w, 0.0);
  CHECK(g.knot_count() == 0);
  CHECK(g(2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g(-7.0) == doctest::Approx(-7.0).epsilon(1e-15));
}

TEST_CASE("random affine combination agrees with dense-sampling oracle") {
  Rng rng(7);
  std::vector<PwlFunction> fs;
  std::vector<double> ws;
  for (int i = 0; i < 5; ++i) {
    fs.push_back(random_pwl(rng, 4 + i));
    ws.push_back(rng.normal());
  }
  const double bias = rng.normal();
  const PwlFunction g = affine_combine(fs, ws, bias);
  for (const double x : sample_points(rng, 1000, 8.0)) {
    double direct = bias;
    for (std::size_t i = 0; i < fs.size(); ++i) direct += ws[i] * fs[i](x);
    CHECK(rel_err(g(x), direct) < 1e-12);
  }
}

TEST_CASE("relu of a line creates one knot at the root") {
  const PwlFunction g = relu(PwlFunction::line(1.0, 0.0));
  CHECK(g.knot_count() == 1);
  CHECK(g.breakpoints()[0] == 0.0);
  CHECK(g(1.0) == 1.0);
  CHECK(g(-1.0) == 0.0);

  const PwlFunction h = relu(PwlFunction::line(2.0, -4.0));
  CHECK(h.knot_count() == 1);
  CHECK(h.breakpoints()[0] == doctest::Approx(2.0));
}

TEST_CASE("relu leaves a nonnegative wedge unchanged") {
  const PwlFunction wedge = PwlFunction::from_breakpoints({0.0}, 0.0, {-1.0, 1.0});  // |x|
  const PwlFunction g = relu(wedge);
  CHECK(g.knot_count() == 1);
  Rng rng(5);
  for (const double x : sample_points(rng, 200, 4.0)) CHECK(g(x) == wedge(x));
}

TEST_CASE("relu of a random spline equals max(0, f) pointwise") {
  Rng rng(3);
  const PwlFunction f = random_pwl(rng, 10);
  const PwlFunction g = relu(f);
  for (const double x : sample_points(rng, 1000, 8.0)) {
    const double expect = std::max(0.0, f(x));
    CHECK(rel_err(g(x), expect) < 1e-12);
  }
}

TEST_CASE("knot counts of basic shapes") {
  CHECK(knot_count(PwlFunction::relu_unit()) == 1);
  CHECK(knot_count(PwlFunction::line(3.0, -1.0)) == 0);
}

TEST_CASE("single-layer network has one knot per neuron") {
  const NetConfig cfg = NetConfig::single_layer(10, uniform_dist(), uniform_dist(),
                                                uniform_dist(), uniform_dist());
  for (std::uint64_t t = 0; t < 20; ++t) {
    const NetworkParams p = sample_network(cfg, 1234, t);
    CHECK(network_knot_count_reference(p) == 10);
  }
}

TEST_CASE("root counts of simple functions") {
  CHECK(count_sign_change_roots(PwlFunction::line(1.0, 0.0)) == 1);
  CHECK(count_sign_change_roots(PwlFunction::relu_unit()) == 0);  // tangency
  CHECK(count_sign_change_roots(PwlFunction::line(0.0, 5.0)) == 0);
  // Wedge dipping below zero: two crossings.
  const PwlFunction vee = PwlFunction::from_breakpoints({0.0}, -1.0, {-1.0, 1.0});
  CHECK(count_sign_change_roots(vee) == 2);
}

TEST_CASE("root count on an interval respects open endpoints") {
  const PwlFunction f = PwlFunction::line(1.0, 0.0);
  CHECK(count_sign_change_roots(f, {-2.0, 2.0}) == 1);
  CHECK(count_sign_change_roots(f, {0.0, 2.0}) == 0);   // root on the boundary
  CHECK(count_sign_change_roots(f, {-2.0, 0.0}) == 0);
  CHECK(count_sign_change_roots(f, {1.0, 5.0}) == 0);
}

namespace {

// Independent root oracle: direct summation values at breakpoints plus one
// analytic solve per bracketing segment.
long oracle_roots(const PwlFunction& f, const std::vector<double>& knots,
                  const std::vector<double>& steps, double c1, double c0) {
  auto value = [&](double x) { return direct_canonical_eval(knots, steps, c1, c0, x); };
  const auto xs = f.breakpoints();
  long roots = 0;
  int last = 0;
  // Far-left sign from the limit slope.
  if (c1 != 0.0) last = c1 > 0 ? -1 : 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = value(xs[i]);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++roots;
    last = s;
  }
  double sf = c1;
  for (double s : steps) sf += s;
  if (sf != 0.0) {
    const int s = sf > 0 ? 1 : -1;
    if (last != 0 && s != last) ++roots;
  }
  return roots;
}

}  // namespace

TEST_CASE("root count of a 50-knot canonical spline matches the analytic oracle") {
  const NetConfig cfg = NetConfig::single_layer(50, normal_dist(), normal_dist(),
                                                rademacher_dist(), zero_dist());
  for (std::uint64_t t = 0; t < 50; ++t) {
    const NetworkParams p = sample_network(cfg, 11, t);
    const CanonicalForm cf = to_canonical(p);
    std::vector<PwlFunction> units;
    std::vector<double> ws;
    for (long j = 0; j < cf.size(); ++j) {
      units.push_back(PwlFunction::from_breakpoints(
          {cf.knots()[static_cast<std::size_t>(j)]}, 0.0, {0.0, 1.0}));
      ws.push_back(cf.steps()[static_cast<std::size_t>(j)]);
    }
    units.push_back(PwlFunction::line(cf.c1(), cf.c0()));
    ws.push_back(1.0);
    const PwlFunction f = affine_combine(units, ws, 0.0);

    const long expect = oracle_roots(f, {cf.knots().begin(), cf.knots().end()},
                                     {cf.steps().begin(), cf.steps().end()}, cf.c1(), cf.c0());
    CHECK(count_sign_change_roots(f) == expect);
  }
}

TEST_CASE("knot monotonicity under relu") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const PwlFunction f = random_pwl(rng, 1 + static_cast<int>(rng.next_u64() % 12));
    const long before = knot_count(f);
    const long roots = count_sign_change_roots(f);
    const long after = knot_count(relu(f));
    CHECK(after <= before + roots);
  }
}

TEST_CASE("composed expressions stay pointwise-exact") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const PwlFunction a = random_pwl(rng, 6);
    const PwlFunction b = random_pwl(rng, 3);
    const double wa = rng.normal(), wb = rng.normal(), bias = rng.normal();
    const std::vector<PwlFunction> fs = {relu(a), b};
    const std::vector<double> ws = {wa, wb};
    const PwlFunction g = relu(affine_combine(fs, ws, bias));
    for (const double x : sample_points(rng, 50, 8.0)) {
      const double direct = std::max(0.0, wa * std::max(0.0, a(x)) + wb * b(x) + bias);
      CHECK(rel_err(g(x), direct) < 1e-12);
    }
  }
}

TEST_CASE("construction rejects malformed pieces") {
  CHECK_THROWS_AS(PwlFunction::from_breakpoints({1.0, 0.0}, 0.0, {0.0, 1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PwlFunction::from_breakpoints({0.0}, 0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PwlFunction::from_breakpoints({0.0}, std::nan(""), {0.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("breakpoints within merge tolerance collapse") {
  const double eps = 1e-14;
  const PwlFunction f = PwlFunction::from_breakpoints({1.0, 1.0 + eps}, 0.0, {0.0, 5.0, 1.0});
  CHECK(f.knot_count() == 1);
}

TEST_CASE("left-end root condition matches the sign rule") {
  // For a canonical spline the (-inf, x_1) piece is the line c1 x + c0; it
  // crosses zero there iff x_1 + c0/c1 > 0.
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const double c1 = rng.normal();
    const double c0 = rng.normal();
    const double x1 = rng.normal();
    std::vector<double> knots = {x1, x1 + std::abs(rng.normal()) + 0.1};
    std::vector<double> steps = {rng.normal(), rng.normal()};
    const CanonicalForm cf(knots, steps, c1, c0);
    const bool expect = c1 != 0.0 && x1 + c0 / c1 > 0.0;
    CHECK(end_segment_roots(cf).left == expect);
  }
}
