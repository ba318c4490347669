#pragma once

#include <cstdint>
#include <vector>

#include "splinewalk/pwl.hpp"
#include "splinewalk/rng.hpp"

namespace splinewalk {

// Layer/width layout plus the sampling law of every parameter group.
struct NetConfig {
  int layers = 1;
  std::vector<int> widths;  // widths.size() == layers
  DistributionSpec w_input, b_input;    // first hidden layer
  DistributionSpec w_hidden, b_hidden;  // layers 2..l
  DistributionSpec w_output, b_output;  // linear output layer

  static NetConfig single_layer(int n, DistributionSpec w1, DistributionSpec b1,
                                DistributionSpec w2, DistributionSpec b2);
  // Same width and the same law for every weight and bias.
  static NetConfig dense(int layers, int width, DistributionSpec all);

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// All weights and biases of one sampled R->R network, plus the seed pair that
// regenerates it. weights[i] is row-major n_i x n_{i-1} (n_0 = 1); the last
// entry is the 1 x n_l output row. biases[i] matches; the output bias is a
// single value.
struct NetworkParams {
  NetConfig cfg;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  int hidden_layers() const { return cfg.layers; }
  int width(int layer) const { return cfg.widths[static_cast<std::size_t>(layer - 1)]; }
};

NetworkParams sample_network(const NetConfig& cfg, std::uint64_t master_seed,
                             std::uint64_t trial_index);

// Exact spline of every neuron before and after activation. Reference path:
// built purely from pwl operations, kept for testing the fast kernel.
struct PropagationTrace {
  std::vector<std::vector<PwlFunction>> pre;   // v-bar per layer, per neuron
  std::vector<std::vector<PwlFunction>> post;  // relu(v-bar)
  PwlFunction output;

  PropagationTrace() : output(PwlFunction::line(0.0, 0.0)) {}
};

PropagationTrace propagate_exact(const NetworkParams& params);

// Knot count of the network function. The default implementation propagates
// all neurons of a layer on a shared breakpoint grid (dense row operations,
// no per-call merging); the reference recomputes it through propagate_exact.
long network_knot_count(const NetworkParams& params);
long network_knot_count_reference(const NetworkParams& params);

// Full output spline from the fast kernel (for cross-checks and evaluation).
PwlFunction network_output_spline(const NetworkParams& params);

// Probability that all m_prev upstream knots survive a layer of n_next
// neurons: (1 - 2^-n_next)^m_prev.
double preservation_probability(int n_next, long m_prev);

// Smallest real width for which preservation beats 1/2:
// -log2(1 - 2^(-1/m_prev)); the series form log2(m) - log2(ln 2) is its
// large-m approximation.
double min_width_half_preservation(long m_prev);
double min_width_half_preservation_series(long m_prev);

struct RetentionCount {
  long retained = 0;
  long total = 0;
};

// How many knots of the layer i-1 outputs reappear among the layer i
// outputs (abscissa match within merge tolerance). Requires i >= 2.
RetentionCount knot_retention_trial(const NetworkParams& params, int layer_i);

}  // namespace splinewalk
