#pragma once

#include <cmath>
#include <cstdint>

namespace splinewalk {

// Streaming mean/variance accumulator (Welford). merge() combines two
// accumulators so trial blocks can be reduced in a fixed order.
struct Estimator {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the mean

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Estimator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double delta = other.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += other.m2 + delta * delta * na * nb / total;
    count += other.count;
  }

  // Sample variance (n - 1 denominator).
  double variance() const {
    if (count < 2) return 0.0;
    return m2 / static_cast<double>(count - 1);
  }

  double stddev() const { return std::sqrt(variance()); }

  double standard_error() const {
    if (count < 1) return 0.0;
    return stddev() / std::sqrt(static_cast<double>(count));
  }

  // 95% confidence half-width (normal approximation).
  double halfwidth95() const { return 1.96 * standard_error(); }
};

}  // namespace splinewalk
