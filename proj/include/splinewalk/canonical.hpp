#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splinewalk/estimator.hpp"
#include "splinewalk/netgen.hpp"

namespace splinewalk {

// A single-layer network rewritten so that every rectified unit activates in
// the +x direction: y(x) = sum_j steps[j] * relu(x - knots[j]) + c1*x + c0,
// with knots ascending. Immutable; prefix sums make evaluation O(log n).
class CanonicalForm {
 public:
  CanonicalForm(std::vector<double> knots, std::vector<double> steps, double c1, double c0);

  double eval(double x) const;
  // Path values y_k = eval(knots[k]) via the iterative recurrence.
  std::vector<double> values_at_knots() const;
  // eval at an ascending batch of query points, O(n + queries).
  std::vector<double> eval_sorted(std::span<const double> queries) const;

  std::span<const double> knots() const { return knots_; }
  std::span<const double> steps() const { return steps_; }
  double c1() const { return c1_; }
  double c0() const { return c0_; }
  long size() const { return static_cast<long>(knots_.size()); }

  // Copy with the line coefficients replaced (root-count probes).
  CanonicalForm with_line(double c1, double c0) const;

 private:
  std::vector<double> knots_;
  std::vector<double> steps_;
  std::vector<double> prefix_s_;   // running sum of steps
  std::vector<double> prefix_sx_;  // running sum of steps * knot
  double c1_ = 0.0;
  double c0_ = 0.0;
};

// Lemma of the forward-facing transform: steps[j] = w2_j * |w1_j|,
// knots[j] = -b1_j / w1_j, c1 = sum_{w1<0} w2 w1, c0 = sum_{w1<0} w2 b1 + b2.
// Requires a single-layer network with no zero input weight; knots that
// coincide exactly are merged with summed steps.
CanonicalForm to_canonical(const NetworkParams& params);

enum class RootDomain { AllReals, InteriorKnotSpan };

// Strict sign-change roots in the chosen domain. The (-inf, x_1) end
// contributes one root iff c1 != 0 and sgn(c1) == sgn(c1*x_1 + c0); the
// (x_n, inf) end mirrors that with the accumulated final slope.
long root_count(const CanonicalForm& cf, RootDomain domain);

struct EndRoots {
  bool left = false;
  bool right = false;
};
EndRoots end_segment_roots(const CanonicalForm& cf);

// Monte Carlo sample statistics of the transform parameters. Correlations
// pair each trial's first (unsorted) neuron with that trial's c1/c0 so the
// samples are i.i.d.; reported standard errors are 1/sqrt(trials).
struct ParamStats {
  double corr_s_x = 0.0;
  double corr_s_c1 = 0.0;
  double corr_c0_c1 = 0.0;
  double var_c0 = 0.0;
  double var_c1 = 0.0;
  double corr_se = 0.0;      // ~1/sqrt(trials)
  double var_rel_se = 0.0;   // ~sqrt(2/trials)
  long long trials = 0;
};
ParamStats parameter_statistics(const NetConfig& cfg, long long trials, std::uint64_t seed);

struct EndRootProbability {
  Estimator left;
  Estimator right;
};
EndRootProbability end_root_probability(const NetConfig& cfg, long long trials,
                                        std::uint64_t seed);

// Empirical distribution of the line-coefficient ratio c0/c1.
struct RatioStats {
  std::vector<double> sorted_samples;
  double p_greater_one = 0.0;
  double median = 0.0;
  double iqr_scale = 0.0;  // (q75 - q25)/2: the scale of a centered Cauchy
  long long trials = 0;
};
RatioStats cauchy_ratio_stats(const NetConfig& cfg, long long trials, std::uint64_t seed);

}  // namespace splinewalk
