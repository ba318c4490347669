#pragma once

#include <span>

namespace splinewalk {

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double resid_rms = 0.0;
  FitWindow window;
  long points = 0;
};

// Ordinary least squares y = slope * x + intercept.
FitResult fit_linear(std::span<const double> x, std::span<const double> y);

// Least squares on (ln x, ln y), restricted to x in [window.lo, window.hi]
// with x, y > 0. The fitted slope is the power-law exponent.
FitResult fit_loglog(std::span<const double> x, std::span<const double> y, FitWindow window);

// Least squares on (ln x, y), same windowing; the slope multiplies ln x.
FitResult fit_semilog(std::span<const double> x, std::span<const double> y, FitWindow window);

// Standard normal quantile (Acklam's rational approximation, ~1e-9).
double normal_quantile(double p);

// Quantile of the standard Cauchy law: tan(pi * (p - 1/2)).
double cauchy_quantile(double p);

}  // namespace splinewalk
