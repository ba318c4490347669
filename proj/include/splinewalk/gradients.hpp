#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splinewalk/netgen.hpp"

namespace splinewalk {

// Heaviside step with H(0) = 1; the derivative convention of the rectifier.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

// Scalar forward pass: pre- and post-activation value of every neuron at x.
struct ScalarForward {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  double output = 0.0;
};
ScalarForward forward_at(const NetworkParams& params, double x);

// d(output)/d(bias of neuron k in layer i) at input x, by layered backward
// accumulation. Layers and neurons are 1-based.
double bias_gradient(const NetworkParams& params, double x, int layer_i, int neuron_k);

// All bias gradients in one backward sweep: result[i-1][k-1].
std::vector<std::vector<double>> bias_gradients_all(const NetworkParams& params, double x);

// Shape of a zero-bias neuron's pre-activation, which has its only knot at
// the origin. WedgeDown means the post-activation is identically zero.
enum class NodeShape { VShape, WedgeDown, HalfLeft, HalfRight };

struct SlopePair {
  double left = 0.0;
  double right = 0.0;
};

// Pre-activation (left, right) slopes at the origin for every neuron of a
// zero-bias network. Throws if any bias is nonzero.
std::vector<std::vector<SlopePair>> zero_bias_pre_slopes(const NetworkParams& params);

NodeShape classify(const SlopePair& pre);
NodeShape classify_node_zero_bias(const NetworkParams& params, int layer_i, int neuron_k);

// Empirical bias-gradient distribution at initialization (zero biases):
// exact point mass at zero plus moments of the nonzero part.
struct GradientDistribution {
  long long total = 0;
  long long zeros = 0;
  double zero_mass = 0.0;
  double nonzero_mean = 0.0;
  double nonzero_var = 0.0;
  double nonzero_skew = 0.0;
  double nonzero_ex_kurtosis = 0.0;
};
GradientDistribution gradient_distribution(const NetConfig& cfg, int layer_i,
                                           std::span<const double> xs, long long trials,
                                           std::uint64_t seed);

// WedgeDown frequency per hidden layer over many zero-bias networks.
struct ShapeFrequencies {
  std::vector<double> wedge_freq;  // index 0 -> layer 1
  std::vector<double> se;
  long long neurons_per_layer = 0;
};
ShapeFrequencies wedge_frequencies(const NetConfig& cfg, long long trials, std::uint64_t seed);

enum class Loss { AbsError, SquaredError };

// d(loss)/dy for the two standard losses: sgn(y - yhat) or 2(y - yhat).
double loss_gradient_factor(double y, double yhat, Loss loss);

}  // namespace splinewalk
