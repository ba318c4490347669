#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splinewalk/canonical.hpp"
#include "splinewalk/estimator.hpp"
#include "splinewalk/rng.hpp"

namespace splinewalk {

// Integrated random walk with variable step sizes. slopes[k] is the slope
// in force after knot k (slopes[0] before the first knot), so
// y_{k+1} = y_k + (x_{k+1} - x_k) * slopes[k].
struct IrwPath {
  std::vector<double> xs;      // x_1..x_n, ascending
  std::vector<double> ys;      // y_1..y_n
  std::vector<double> slopes;  // y'_0..y'_n (xs.size() + 1 entries)

  bool consistent(double rtol = 1e-12) const;
};

// Cumulative walk y'_k = y0_prime + sum_{j<=k} s_j, returned for k = 0..n.
std::vector<double> random_walk(long long n, const DistributionSpec& step_dist,
                                double y0_prime, Rng& rng);

// slope_seq holds y'_0..y'_n; xs holds the n knot abscissae.
IrwPath integrate(std::span<const double> slope_seq, std::span<const double> xs, double y1);
IrwPath integrate_fixed(std::span<const double> slope_seq, double dx, double x1, double y1);

// Initial conditions y'_0 = c1 and y_1 = c1 x_1 + c0 make the path visit
// exactly the knot points of the canonical form.
IrwPath path_from_network(const CanonicalForm& cf);

// Strict sign changes of the path's piecewise-linear interpolation; with
// include_ends the half-infinite segments governed by slopes.front() and
// slopes.back() are examined too.
long crossing_count(const IrwPath& path, bool include_ends);

struct FirstCrossing {
  long long index = 0;        // 1-based path point ending the crossing segment
  double abs_y_prev = 0.0;    // |y_{index-1}|
  double abs_yprime_prev = 0.0;
};
std::optional<FirstCrossing> first_crossing(const IrwPath& path);

enum class WalkVariant { FixedStep, CauchyKnots };

// Aggregated crossing statistics of homogeneous-IC walks (y_1 = y'_0 = 0),
// counting inside (x_1, x_n). FixedStep draws N(0,1) slope increments on a
// unit grid; CauchyKnots places the knots at sorted Cauchy(0,1) points.
struct CrossingStats {
  long long trials = 0;
  long long steps = 0;
  std::vector<long long> first_index;  // per trial; 0 when never crossed
  std::vector<int> crossings;          // per trial
  std::vector<double> pre_abs_y;       // sorted over crossed trials
  std::vector<double> pre_abs_yprime;  // sorted
  Estimator mean_crossings;

  std::vector<double> pmf() const;  // index = crossing count, sums to 1
  // P(first crossing index > k) for each query k.
  std::vector<double> survival(std::span<const long long> ks) const;
  long long never_crossed() const;
};
CrossingStats crossing_statistics(WalkVariant variant, long long steps, long long trials,
                                  std::uint64_t seed);

// Mean crossings in (x_1, x_n) for a grid of walk lengths.
struct CrossingCurvePoint {
  long long n = 0;
  Estimator mean;
};
std::vector<CrossingCurvePoint> crossing_curve(WalkVariant variant,
                                               std::span<const long long> sizes,
                                               std::span<const long long> trials,
                                               std::uint64_t seed);

// Variance of the zeroed-line network walk, pooled per Cauchy-quantile cell.
struct QuantileVariance {
  std::vector<double> center;
  std::vector<long long> count;
  std::vector<double> variance;
};
QuantileVariance variance_by_quantile(long long n, long long trials, std::uint64_t seed);

// corr(y(x), y(x+h)) with x and x+h on the Cauchy-quantile grid.
struct CorrelationSurface {
  std::vector<double> grid;
  std::vector<std::vector<double>> corr;
};
CorrelationSurface shifted_correlation(long long n, long long trials, std::uint64_t seed);

}  // namespace splinewalk
