#include "splinewalk/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace splinewalk {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

PwlFunction PwlFunction::line(double slope, double intercept) {
  PwlFunction f;
  f.slopes_ = {slope};
  f.anchor_ = intercept;  // f(0)
  return f;
}

PwlFunction PwlFunction::relu_unit() {
  return from_breakpoints({0.0}, 0.0, {0.0, 1.0});
}

PwlFunction PwlFunction::from_breakpoints(std::vector<double> xs, double anchor,
                                          std::vector<double> slopes) {
  if (slopes.size() != xs.size() + 1)
    throw std::invalid_argument("PwlFunction: slopes.size() must be breakpoints + 1");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1]))
      throw std::invalid_argument("PwlFunction: breakpoints must be ascending");
  for (double x : xs)
    if (!std::isfinite(x)) throw std::invalid_argument("PwlFunction: non-finite breakpoint");
  for (double s : slopes)
    if (!std::isfinite(s)) throw std::invalid_argument("PwlFunction: non-finite slope");
  if (!std::isfinite(anchor)) throw std::invalid_argument("PwlFunction: non-finite anchor");

  PwlFunction f;
  f.xs_ = std::move(xs);
  f.slopes_ = std::move(slopes);
  f.anchor_ = anchor;
  f.canonicalize();
  return f;
}

void PwlFunction::canonicalize() {
  // Exact values at the raw breakpoints, reconstructed left to right.
  std::vector<double> vals(xs_.size());
  if (!xs_.empty()) {
    vals[0] = anchor_;
    for (std::size_t i = 1; i < xs_.size(); ++i)
      vals[i] = vals[i - 1] + slopes_[i] * (xs_[i] - xs_[i - 1]);
  }

  std::vector<double> out_xs, out_vals, out_slopes;
  out_slopes.push_back(slopes_[0]);
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double s_next = slopes_[i + 1];
    if (!out_xs.empty() && xs_[i] - out_xs.back() <= merge_eps(out_xs.back())) {
      // Near-duplicate abscissa: collapse onto the existing breakpoint.
      out_slopes.back() = s_next;
      if (out_xs.size() >= 2 || out_slopes.size() >= 2) {
        // Re-test the kept breakpoint with its new right slope.
        const double s_prev = out_slopes[out_slopes.size() - 2];
        if (!genuine_knot(s_prev, s_next)) {
          out_xs.pop_back();
          out_vals.pop_back();
          out_slopes.erase(out_slopes.end() - 2);
        }
      }
      continue;
    }
    if (!genuine_knot(out_slopes.back(), s_next)) continue;  // not a real knot
    out_xs.push_back(xs_[i]);
    out_vals.push_back(vals[i]);
    out_slopes.push_back(s_next);
  }

  if (out_xs.empty()) {
    // Degenerated to a line: express the anchor as f(0).
    double f0 = anchor_;
    if (!xs_.empty()) f0 = anchor_ - slopes_[0] * xs_[0];
    anchor_ = f0;
  } else {
    anchor_ = out_vals.front();
  }
  xs_ = std::move(out_xs);
  values_ = std::move(out_vals);
  slopes_ = std::move(out_slopes);
}

double PwlFunction::operator()(double x) const {
  if (xs_.empty()) return anchor_ + slopes_[0] * x;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  if (i == 0) return values_[0] + slopes_[0] * (x - xs_[0]);
  return values_[i - 1] + slopes_[i] * (x - xs_[i - 1]);
}

PwlFunction affine_combine(std::span<const PwlFunction* const> fs,
                           std::span<const double> weights, double bias) {
  if (fs.empty() || fs.size() != weights.size())
    throw std::invalid_argument("affine_combine: need matching, non-empty inputs");

  // Union of breakpoints, deduplicated within merge tolerance.
  std::vector<double> union_xs;
  for (const PwlFunction* f : fs)
    union_xs.insert(union_xs.end(), f->breakpoints().begin(), f->breakpoints().end());
  std::sort(union_xs.begin(), union_xs.end());
  std::vector<double> xs;
  for (double x : union_xs)
    if (xs.empty() || x - xs.back() > merge_eps(xs.back())) xs.push_back(x);

  // Per-segment slope sums via one index walk per input.
  std::vector<double> slopes(xs.size() + 1, 0.0);
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const auto fxs = fs[fi]->breakpoints();
    const auto fsl = fs[fi]->slopes();
    const double w = weights[fi];
    std::size_t j = 0;  // index into fxs: number of f-breakpoints at or left of segment
    slopes[0] += w * fsl[0];
    for (std::size_t seg = 1; seg < slopes.size(); ++seg) {
      // Segment seg lies right of xs[seg - 1].
      while (j < fxs.size() && fxs[j] <= xs[seg - 1] + merge_eps(xs[seg - 1])) ++j;
      slopes[seg] += w * fsl[j];
    }
  }

  double anchor = bias;
  const double x0 = xs.empty() ? 0.0 : xs.front();
  for (std::size_t fi = 0; fi < fs.size(); ++fi) anchor += weights[fi] * (*fs[fi])(x0);

  return PwlFunction::from_breakpoints(std::move(xs), anchor, std::move(slopes));
}

PwlFunction affine_combine(std::span<const PwlFunction> fs,
                           std::span<const double> weights, double bias) {
  std::vector<const PwlFunction*> ptrs(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) ptrs[i] = &fs[i];
  return affine_combine(std::span<const PwlFunction* const>(ptrs), weights, bias);
}

PwlFunction relu(const PwlFunction& f) {
  const auto xs = f.breakpoints();
  const auto sl = f.slopes();
  const auto vals = f.values();

  if (xs.empty()) {
    const double c1 = sl[0];
    const double c0 = f.anchor_value();  // f(0) for a line
    if (c1 == 0.0) return PwlFunction::line(0.0, c0 > 0.0 ? c0 : 0.0);
    const double root = -c0 / c1;
    if (c1 > 0.0) return PwlFunction::from_breakpoints({root}, 0.0, {0.0, c1});
    return PwlFunction::from_breakpoints({root}, 0.0, {c1, 0.0});
  }

  std::vector<double> out_xs, out_slopes;
  double out_anchor = 0.0;
  bool anchor_set = false;

  auto push_segment = [&](double slope_value) { out_slopes.push_back(slope_value); };
  auto push_knot = [&](double x, double value) {
    out_xs.push_back(x);
    if (!anchor_set) {
      out_anchor = value;
      anchor_set = true;
    }
  };

  // Left half-infinite segment.
  {
    const double v0 = vals[0];
    const double s0 = sl[0];
    const bool root_in_end = s0 != 0.0 && v0 != 0.0 && sign_of(v0) == sign_of(s0);
    if (root_in_end) {
      const double xr = xs[0] - v0 / s0;
      if (v0 > 0.0) {  // dead far left, alive approaching xs[0]
        push_segment(0.0);
        push_knot(xr, 0.0);
        push_segment(s0);
      } else {  // alive far left, dead after xr
        push_segment(s0);
        push_knot(xr, 0.0);
        push_segment(0.0);
      }
    } else {
      const bool alive = v0 > 0.0 || (v0 == 0.0 && s0 < 0.0);
      push_segment(alive ? s0 : 0.0);
    }
    push_knot(xs[0], v0 > 0.0 ? v0 : 0.0);
  }

  // Interior segments.
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double va = vals[i];
    const double vb = vals[i + 1];
    const double s = sl[i + 1];
    if (va * vb < 0.0) {
      const double xr = xs[i] - va / s;
      push_segment(va > 0.0 ? s : 0.0);
      push_knot(xr, 0.0);
      push_segment(vb > 0.0 ? s : 0.0);
    } else {
      const bool alive = va > 0.0 || vb > 0.0;
      push_segment(alive ? s : 0.0);
    }
    push_knot(xs[i + 1], vb > 0.0 ? vb : 0.0);
  }

  // Right half-infinite segment.
  {
    const double vn = vals.back();
    const double sn = sl.back();
    const bool root_in_end = sn != 0.0 && vn != 0.0 && sign_of(vn) != sign_of(sn);
    if (root_in_end) {
      const double xr = xs.back() - vn / sn;
      if (vn > 0.0) {
        push_segment(sn);
        push_knot(xr, 0.0);
        push_segment(0.0);
      } else {
        push_segment(0.0);
        push_knot(xr, 0.0);
        push_segment(sn);
      }
    } else {
      const bool alive = vn > 0.0 || (vn == 0.0 && sn > 0.0);
      push_segment(alive ? sn : 0.0);
    }
  }

  return PwlFunction::from_breakpoints(std::move(out_xs), out_anchor, std::move(out_slopes));
}

long knot_count(const PwlFunction& f) { return f.knot_count(); }

long count_sign_change_roots(const PwlFunction& f, Interval domain) {
  if (!(domain.lo < domain.hi))
    throw std::invalid_argument("count_sign_change_roots: empty interval");

  // Sign samples at: the lower boundary (or the limit toward -inf), every
  // breakpoint strictly inside the domain, and the upper boundary (or the
  // limit toward +inf). Between consecutive samples f is linear, so each
  // strict sign flip is exactly one root; zeros are skipped so a zero-touch
  // without a flip never counts, and a zero at a breakpoint counts once.
  std::vector<int> signs;
  const auto xs = f.breakpoints();
  const auto vals = f.values();

  if (std::isinf(domain.lo)) {
    const double s0 = f.left_slope();
    if (s0 != 0.0)
      signs.push_back(-sign_of(s0));
    else
      signs.push_back(sign_of(xs.empty() ? f.anchor_value() : vals[0]));
  } else {
    signs.push_back(sign_of(f(domain.lo)));
  }

  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > domain.lo && xs[i] < domain.hi) signs.push_back(sign_of(vals[i]));

  if (std::isinf(domain.hi)) {
    const double sn = f.right_slope();
    if (sn != 0.0)
      signs.push_back(sign_of(sn));
    else
      signs.push_back(sign_of(xs.empty() ? f.anchor_value() : vals.back()));
  } else {
    signs.push_back(sign_of(f(domain.hi)));
  }

  long roots = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++roots;
    last = s;
  }
  return roots;
}

}  // namespace splinewalk
