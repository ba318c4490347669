#include "splinewalk/gradients.hpp"

#include <cmath>
#include <stdexcept>

#include "splinewalk/estimator.hpp"
#include "splinewalk/parallel.hpp"

namespace splinewalk {

ScalarForward forward_at(const NetworkParams& params, double x) {
  const int l = params.hidden_layers();
  ScalarForward f;
  f.pre.resize(static_cast<std::size_t>(l));
  f.post.resize(static_cast<std::size_t>(l));

  std::vector<double> prev = {x};
  for (int i = 1; i <= l; ++i) {
    const int n = params.width(i);
    const int n_prev = static_cast<int>(prev.size());
    const auto& w = params.weights[static_cast<std::size_t>(i - 1)];
    const auto& b = params.biases[static_cast<std::size_t>(i - 1)];
    auto& pre = f.pre[static_cast<std::size_t>(i - 1)];
    auto& post = f.post[static_cast<std::size_t>(i - 1)];
    pre.resize(static_cast<std::size_t>(n));
    post.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      double v = b[static_cast<std::size_t>(k)];
      const double* row = &w[static_cast<std::size_t>(k) * n_prev];
      for (int j = 0; j < n_prev; ++j) v += row[j] * prev[static_cast<std::size_t>(j)];
      pre[static_cast<std::size_t>(k)] = v;
      post[static_cast<std::size_t>(k)] = v > 0.0 ? v : 0.0;
    }
    prev = post;
  }

  const auto& w_out = params.weights[static_cast<std::size_t>(l)];
  double y = params.biases[static_cast<std::size_t>(l)][0];
  for (std::size_t j = 0; j < w_out.size(); ++j) y += w_out[j] * prev[j];
  f.output = y;
  return f;
}

std::vector<std::vector<double>> bias_gradients_all(const NetworkParams& params, double x) {
  const ScalarForward f = forward_at(params, x);
  const int l = params.hidden_layers();

  std::vector<std::vector<double>> delta(static_cast<std::size_t>(l));

  // Output layer first: d y / d b_{lk} = H(pre_{lk}) * w_out[k].
  {
    const int n = params.width(l);
    const auto& w_out = params.weights[static_cast<std::size_t>(l)];
    auto& d = delta[static_cast<std::size_t>(l - 1)];
    d.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      d[static_cast<std::size_t>(k)] =
          heaviside(f.pre[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(k)]) *
          w_out[static_cast<std::size_t>(k)];
  }

  for (int i = l - 1; i >= 1; --i) {
    const int n = params.width(i);
    const int n_next = params.width(i + 1);
    const auto& w_next = params.weights[static_cast<std::size_t>(i)];
    auto& d = delta[static_cast<std::size_t>(i - 1)];
    const auto& d_next = delta[static_cast<std::size_t>(i)];
    d.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int j = 0; j < n_next; ++j)
        acc += w_next[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(k)] *
               d_next[static_cast<std::size_t>(j)];
      d[static_cast<std::size_t>(k)] =
          heaviside(f.pre[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) * acc;
    }
  }
  return delta;
}

double bias_gradient(const NetworkParams& params, double x, int layer_i, int neuron_k) {
  if (layer_i < 1 || layer_i > params.hidden_layers())
    throw std::invalid_argument("bias_gradient: layer out of range");
  if (neuron_k < 1 || neuron_k > params.width(layer_i))
    throw std::invalid_argument("bias_gradient: neuron out of range");
  return bias_gradients_all(params, x)[static_cast<std::size_t>(layer_i - 1)]
                                      [static_cast<std::size_t>(neuron_k - 1)];
}

std::vector<std::vector<SlopePair>> zero_bias_pre_slopes(const NetworkParams& params) {
  for (std::size_t i = 0; i + 1 < params.biases.size(); ++i)
    for (double b : params.biases[i])
      if (b != 0.0)
        throw std::invalid_argument("zero_bias_pre_slopes: biases must all be zero");

  const int l = params.hidden_layers();
  std::vector<std::vector<SlopePair>> pre(static_cast<std::size_t>(l));

  // Post-activation (left, right) slopes of the previous layer; the input
  // itself is the identity with slopes (1, 1).
  std::vector<SlopePair> prev_post = {{1.0, 1.0}};
  for (int i = 1; i <= l; ++i) {
    const int n = params.width(i);
    const int n_prev = static_cast<int>(prev_post.size());
    const auto& w = params.weights[static_cast<std::size_t>(i - 1)];
    auto& layer_pre = pre[static_cast<std::size_t>(i - 1)];
    layer_pre.resize(static_cast<std::size_t>(n));
    std::vector<SlopePair> post(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double* row = &w[static_cast<std::size_t>(k) * n_prev];
      SlopePair p;
      for (int j = 0; j < n_prev; ++j) {
        p.left += row[j] * prev_post[static_cast<std::size_t>(j)].left;
        p.right += row[j] * prev_post[static_cast<std::size_t>(j)].right;
      }
      layer_pre[static_cast<std::size_t>(k)] = p;
      // relu of a one-knot-at-origin function: the left branch survives iff
      // it points up to the left (negative slope), the right branch iff it
      // points up to the right.
      post[static_cast<std::size_t>(k)] = {p.left < 0.0 ? p.left : 0.0,
                                           p.right > 0.0 ? p.right : 0.0};
    }
    prev_post = std::move(post);
  }
  return pre;
}

NodeShape classify(const SlopePair& pre) {
  const bool left_active = pre.left < 0.0;
  const bool right_active = pre.right > 0.0;
  if (left_active && right_active) return NodeShape::VShape;
  if (!left_active && !right_active) return NodeShape::WedgeDown;
  if (right_active) return NodeShape::HalfRight;
  return NodeShape::HalfLeft;
}

NodeShape classify_node_zero_bias(const NetworkParams& params, int layer_i, int neuron_k) {
  if (layer_i < 1 || layer_i > params.hidden_layers())
    throw std::invalid_argument("classify_node_zero_bias: layer out of range");
  if (neuron_k < 1 || neuron_k > params.width(layer_i))
    throw std::invalid_argument("classify_node_zero_bias: neuron out of range");
  const auto pre = zero_bias_pre_slopes(params);
  return classify(pre[static_cast<std::size_t>(layer_i - 1)][static_cast<std::size_t>(neuron_k - 1)]);
}

GradientDistribution gradient_distribution(const NetConfig& cfg, int layer_i,
                                           std::span<const double> xs, long long trials,
                                           std::uint64_t seed) {
  if (layer_i < 1 || layer_i > cfg.layers)
    throw std::invalid_argument("gradient_distribution: layer out of range");
  if (xs.empty()) throw std::invalid_argument("gradient_distribution: need sample points");
  NetConfig zcfg = cfg;
  zcfg.b_input = zcfg.b_hidden = zcfg.b_output = zero_dist();

  struct Acc {
    long long total = 0, zeros = 0;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;  // raw moments of the nonzero part
    void merge(const Acc& o) {
      total += o.total;
      zeros += o.zeros;
      s1 += o.s1;
      s2 += o.s2;
      s3 += o.s3;
      s4 += o.s4;
    }
  };

  const Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(zcfg, seed, static_cast<std::uint64_t>(t));
          for (double x : xs) {
            const auto grads = bias_gradients_all(p, x);
            for (double g : grads[static_cast<std::size_t>(layer_i - 1)]) {
              a.total += 1;
              if (g == 0.0) {
                a.zeros += 1;
              } else {
                a.s1 += g;
                a.s2 += g * g;
                a.s3 += g * g * g;
                a.s4 += g * g * g * g;
              }
            }
          }
        }
      });

  GradientDistribution gd;
  gd.total = acc.total;
  gd.zeros = acc.zeros;
  gd.zero_mass = static_cast<double>(acc.zeros) / static_cast<double>(acc.total);
  const double n = static_cast<double>(acc.total - acc.zeros);
  if (n >= 2) {
    const double m1 = acc.s1 / n;
    const double m2 = acc.s2 / n - m1 * m1;
    const double m3 = acc.s3 / n - 3 * m1 * acc.s2 / n + 2 * m1 * m1 * m1;
    const double m4 = acc.s4 / n - 4 * m1 * acc.s3 / n + 6 * m1 * m1 * acc.s2 / n -
                      3 * m1 * m1 * m1 * m1;
    gd.nonzero_mean = m1;
    gd.nonzero_var = m2;
    if (m2 > 0) {
      gd.nonzero_skew = m3 / std::pow(m2, 1.5);
      gd.nonzero_ex_kurtosis = m4 / (m2 * m2) - 3.0;
    }
  }
  return gd;
}

ShapeFrequencies wedge_frequencies(const NetConfig& cfg, long long trials, std::uint64_t seed) {
  NetConfig zcfg = cfg;
  zcfg.b_input = zcfg.b_hidden = zcfg.b_output = zero_dist();
  const std::size_t l = static_cast<std::size_t>(zcfg.layers);

  // Per-trial wedge fractions feed per-layer estimators: neurons of one net
  // share upstream weights, so the spread must be measured across trials.
  struct Acc {
    std::vector<Estimator> frac;
    void init(std::size_t layers) {
      if (frac.empty()) frac.assign(layers, Estimator{});
    }
    void merge(const Acc& o) {
      if (o.frac.empty()) return;
      init(o.frac.size());
      for (std::size_t i = 0; i < frac.size(); ++i) frac[i].merge(o.frac[i]);
    }
  };

  const Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        a.init(l);
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(zcfg, seed, static_cast<std::uint64_t>(t));
          const auto pre = zero_bias_pre_slopes(p);
          for (std::size_t i = 0; i < l; ++i) {
            long wedge = 0;
            for (const SlopePair& sp : pre[i])
              if (classify(sp) == NodeShape::WedgeDown) ++wedge;
            a.frac[i].add(static_cast<double>(wedge) / static_cast<double>(pre[i].size()));
          }
        }
      });

  ShapeFrequencies sf;
  sf.wedge_freq.resize(l);
  sf.se.resize(l);
  sf.neurons_per_layer = trials * (zcfg.widths.empty() ? 0 : zcfg.widths[0]);
  for (std::size_t i = 0; i < l; ++i) {
    sf.wedge_freq[i] = acc.frac[i].mean;
    sf.se[i] = acc.frac[i].standard_error();
  }
  return sf;
}

double loss_gradient_factor(double y, double yhat, Loss loss) {
  const double r = y - yhat;
  if (loss == Loss::SquaredError) return 2.0 * r;
  return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
}

}  // namespace splinewalk
