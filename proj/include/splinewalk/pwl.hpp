#pragma once

#include <limits>
#include <span>
#include <vector>

namespace splinewalk {

// Relative slope-change threshold below which a breakpoint is not a genuine
// knot, and relative abscissa threshold below which breakpoints merge.
inline constexpr double kKnotTol = 1e-9;
inline constexpr double kMergeTol = 1e-12;

inline double merge_eps(double x) {
  const double ax = x < 0 ? -x : x;
  return kMergeTol * (ax > 1.0 ? ax : 1.0);
}

inline bool genuine_knot(double slope_left, double slope_right) {
  const double d = slope_right - slope_left;
  const double ad = d < 0 ? -d : d;
  double scale = 1.0;
  const double al = slope_left < 0 ? -slope_left : slope_left;
  const double ar = slope_right < 0 ? -slope_right : slope_right;
  if (al > scale) scale = al;
  if (ar > scale) scale = ar;
  return ad > kKnotTol * scale;
}

// Open interval on the extended real line.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Continuous piecewise-linear function on all of R, stored as sorted
// breakpoints, the value at the first breakpoint, and one slope per open
// segment (breakpoints + 1 of them, including the two half-infinite ends).
// Values at the remaining breakpoints are derived and cached. Instances are
// immutable after construction; every constructor canonicalizes, merging
// near-duplicate breakpoints and pruning slope changes below kKnotTol.
class PwlFunction {
 public:
  // A line; anchor_value is f(0).
  static PwlFunction line(double slope, double intercept);
  // max(0, x).
  static PwlFunction relu_unit();
  // Raw pieces: xs ascending, slopes.size() == xs.size() + 1, anchor is the
  // value at xs.front() (or f(0) when xs is empty). Throws
  // std::invalid_argument on malformed input.
  static PwlFunction from_breakpoints(std::vector<double> xs, double anchor,
                                      std::vector<double> slopes);

  double operator()(double x) const;

  std::span<const double> breakpoints() const { return xs_; }
  std::span<const double> slopes() const { return slopes_; }
  std::span<const double> values() const { return values_; }

  double anchor_value() const { return anchor_; }
  double left_slope() const { return slopes_.front(); }
  double right_slope() const { return slopes_.back(); }

  long knot_count() const { return static_cast<long>(xs_.size()); }

 private:
  PwlFunction() = default;
  void canonicalize();

  std::vector<double> xs_;
  std::vector<double> slopes_;  // xs_.size() + 1
  std::vector<double> values_;  // f at each breakpoint
  double anchor_ = 0.0;         // f(xs_[0]), or f(0) when xs_ is empty
};

// Pointwise sum(weights[i] * fs[i]) + bias. The result's breakpoints are a
// subset of the union of the inputs' breakpoints.
PwlFunction affine_combine(std::span<const PwlFunction> fs,
                           std::span<const double> weights, double bias);
PwlFunction affine_combine(std::span<const PwlFunction* const> fs,
                           std::span<const double> weights, double bias);

// Pointwise max(0, f(x)). Inserts a breakpoint at each strict sign-change
// root; breakpoints in dead regions disappear in canonicalization.
PwlFunction relu(const PwlFunction& f);

long knot_count(const PwlFunction& f);

// Number of strict sign-change zeros of f in the open interval. Tangencies
// (f touches zero without changing sign) count zero; a zero lying exactly on
// a breakpoint counts once.
long count_sign_change_roots(const PwlFunction& f, Interval domain = {});

}  // namespace splinewalk
