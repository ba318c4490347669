#include "splinewalk/fit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace splinewalk {

FitResult fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_linear: need at least 3 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");

  FitResult r;
  r.slope = (n * sxy - sx * sy) / denom;
  r.intercept = (sy - r.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.slope * x[i] + r.intercept);
    ss += e * e;
  }
  r.resid_rms = std::sqrt(ss / n);
  r.points = static_cast<long>(x.size());
  return r;
}

namespace {

FitResult windowed_fit(std::span<const double> x, std::span<const double> y,
                       FitWindow window, bool log_y) {
  std::vector<double> tx, ty;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.lo || x[i] > window.hi) continue;
    if (x[i] <= 0.0) continue;
    if (log_y && y[i] <= 0.0) continue;
    tx.push_back(std::log(x[i]));
    ty.push_back(log_y ? std::log(y[i]) : y[i]);
  }
  if (tx.size() < 3) throw std::invalid_argument("windowed fit: fewer than 3 points in window");
  FitResult r = fit_linear(tx, ty);
  r.window = window;
  return r;
}

}  // namespace

FitResult fit_loglog(std::span<const double> x, std::span<const double> y, FitWindow window) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  return windowed_fit(x, y, window, true);
}

FitResult fit_semilog(std::span<const double> x, std::span<const double> y, FitWindow window) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_semilog: size mismatch");
  return windowed_fit(x, y, window, false);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p in (0,1)");

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double q, r, v;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    v = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    v = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    v = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against erfc sharpens the approximation.
  const double e = 0.5 * std::erfc(-v / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(v * v / 2.0);
  return v - u / (1.0 + v * u / 2.0);
}

double cauchy_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("cauchy_quantile: p in (0,1)");
  return std::tan(std::numbers::pi * (p - 0.5));
}

}  // namespace splinewalk
