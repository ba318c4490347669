#include "splinewalk/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace splinewalk {

NetConfig NetConfig::single_layer(int n, DistributionSpec w1, DistributionSpec b1,
                                  DistributionSpec w2, DistributionSpec b2) {
  NetConfig cfg;
  cfg.layers = 1;
  cfg.widths = {n};
  cfg.w_input = w1;
  cfg.b_input = b1;
  cfg.w_hidden = w1;
  cfg.b_hidden = b1;
  cfg.w_output = w2;
  cfg.b_output = b2;
  cfg.validate();
  return cfg;
}

NetConfig NetConfig::dense(int layers, int width, DistributionSpec all) {
  NetConfig cfg;
  cfg.layers = layers;
  cfg.widths.assign(static_cast<std::size_t>(layers), width);
  cfg.w_input = cfg.b_input = cfg.w_hidden = cfg.b_hidden = all;
  cfg.w_output = cfg.b_output = all;
  cfg.validate();
  return cfg;
}

void NetConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("NetConfig.layers: must be >= 1");
  if (widths.size() != static_cast<std::size_t>(layers))
    throw std::invalid_argument("NetConfig.widths: size must equal layers");
  for (int n : widths)
    if (n < 1) throw std::invalid_argument("NetConfig.widths: entries must be >= 1");
  for (const DistributionSpec* d : {&w_input, &b_input, &w_hidden, &b_hidden, &w_output, &b_output})
    if (!(d->scale > 0.0)) throw std::invalid_argument("NetConfig distribution scale: must be > 0");
}

NetworkParams sample_network(const NetConfig& cfg, std::uint64_t master_seed,
                             std::uint64_t trial_index) {
  cfg.validate();
  Rng rng(mix_seed(master_seed, trial_index));

  NetworkParams p;
  p.cfg = cfg;
  p.master_seed = master_seed;
  p.trial_index = trial_index;
  const std::size_t l = static_cast<std::size_t>(cfg.layers);
  p.weights.resize(l + 1);
  p.biases.resize(l + 1);

  int prev = 1;
  for (std::size_t i = 0; i < l; ++i) {
    const int n = cfg.widths[i];
    const DistributionSpec& wd = (i == 0) ? cfg.w_input : cfg.w_hidden;
    const DistributionSpec& bd = (i == 0) ? cfg.b_input : cfg.b_hidden;
    p.weights[i].resize(static_cast<std::size_t>(n) * prev);
    p.biases[i].resize(static_cast<std::size_t>(n));
    for (auto& w : p.weights[i]) w = wd.sample(rng);
    for (auto& b : p.biases[i]) b = bd.sample(rng);
    prev = n;
  }
  p.weights[l].resize(static_cast<std::size_t>(prev));
  for (auto& w : p.weights[l]) w = cfg.w_output.sample(rng);
  p.biases[l] = {cfg.b_output.sample(rng)};
  return p;
}

PropagationTrace propagate_exact(const NetworkParams& params) {
  PropagationTrace trace;
  const int l = params.hidden_layers();
  trace.pre.resize(static_cast<std::size_t>(l));
  trace.post.resize(static_cast<std::size_t>(l));

  const PwlFunction identity = PwlFunction::line(1.0, 0.0);
  std::vector<PwlFunction> prev = {identity};

  for (int i = 1; i <= l; ++i) {
    const int n = params.width(i);
    const int n_prev = static_cast<int>(prev.size());
    auto& pre = trace.pre[static_cast<std::size_t>(i - 1)];
    auto& post = trace.post[static_cast<std::size_t>(i - 1)];
    pre.reserve(static_cast<std::size_t>(n));
    post.reserve(static_cast<std::size_t>(n));
    const auto& w = params.weights[static_cast<std::size_t>(i - 1)];
    const auto& b = params.biases[static_cast<std::size_t>(i - 1)];
    for (int k = 0; k < n; ++k) {
      std::span<const double> row(&w[static_cast<std::size_t>(k) * n_prev],
                                  static_cast<std::size_t>(n_prev));
      pre.push_back(affine_combine(std::span<const PwlFunction>(prev), row,
                                   b[static_cast<std::size_t>(k)]));
      post.push_back(relu(pre.back()));
    }
    prev = post;
  }

  const auto& w_out = params.weights[static_cast<std::size_t>(l)];
  trace.output = affine_combine(std::span<const PwlFunction>(prev),
                                std::span<const double>(w_out),
                                params.biases[static_cast<std::size_t>(l)][0]);
  return trace;
}

long network_knot_count_reference(const NetworkParams& params) {
  return propagate_exact(params).output.knot_count();
}

namespace {

// All neurons of one layer expressed on a shared breakpoint grid:
// per-neuron slope rows (grid.size() + 1 entries) plus the value at grid[0].
// Row operations over the shared grid replace per-function merging, which is
// what makes deep propagation cheap.
struct LayerGrid {
  std::vector<double> xs;
  std::vector<std::vector<double>> slopes;  // one row per neuron
  std::vector<double> val0;                 // value at xs.front() per neuron
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Apply relu to each pre-activation row, collecting every strict
// sign-change root, then rebuild all rows on the union grid.
LayerGrid apply_relu_layer(const LayerGrid& pre) {
  const std::size_t n = pre.slopes.size();
  const std::size_t m = pre.xs.size();

  // Values of every neuron at every grid point, plus each neuron's own
  // sign-change roots (ascending by construction).
  std::vector<std::vector<double>> vals(n, std::vector<double>(m));
  std::vector<std::vector<double>> own_roots(n);
  std::vector<double> roots;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& sl = pre.slopes[k];
    auto& v = vals[k];
    v[0] = pre.val0[k];
    for (std::size_t t = 1; t < m; ++t)
      v[t] = v[t - 1] + sl[t] * (pre.xs[t] - pre.xs[t - 1]);

    auto& mine = own_roots[k];
    if (sl[0] != 0.0 && v[0] != 0.0 && sign_of(v[0]) == sign_of(sl[0]))
      mine.push_back(pre.xs[0] - v[0] / sl[0]);
    for (std::size_t t = 0; t + 1 < m; ++t)
      if (v[t] * v[t + 1] < 0.0) mine.push_back(pre.xs[t] - v[t] / sl[t + 1]);
    if (sl[m] != 0.0 && v[m - 1] != 0.0 && sign_of(v[m - 1]) != sign_of(sl[m]))
      mine.push_back(pre.xs[m - 1] - v[m - 1] / sl[m]);
    roots.insert(roots.end(), mine.begin(), mine.end());
  }

  std::sort(roots.begin(), roots.end());
  LayerGrid post;
  post.xs.reserve(m + roots.size());
  {
    std::size_t a = 0, b = 0;
    while (a < m || b < roots.size()) {
      double x;
      if (b >= roots.size() || (a < m && pre.xs[a] <= roots[b]))
        x = pre.xs[a++];
      else
        x = roots[b++];
      if (post.xs.empty() || x - post.xs.back() > merge_eps(post.xs.back())) post.xs.push_back(x);
    }
  }

  const std::size_t mm = post.xs.size();
  post.slopes.assign(n, std::vector<double>(mm + 1, 0.0));
  post.val0.assign(n, 0.0);

  // The new grid is a superset of the old one, so values and slopes on the
  // new grid come from a single two-pointer walk per neuron. A grid point
  // that is one of the neuron's own roots is an exact zero of that neuron;
  // the extrapolated value there is rounding noise and must not decide a
  // sign, so per-point signs come from the root structure.
  std::vector<double> nv(mm);
  std::vector<double> sright(mm);  // old slope right of each new point
  std::vector<int> sv(mm);         // sign at each new point; 0 at own roots
  for (std::size_t k = 0; k < n; ++k) {
    const auto& sl = pre.slopes[k];
    const auto& v = vals[k];
    const auto& mine = own_roots[k];
    auto& out = post.slopes[k];

    std::size_t oi = 0;  // old points at or left of the current new point
    std::size_t ri = 0;  // own roots consumed
    for (std::size_t t = 0; t < mm; ++t) {
      const double x = post.xs[t];
      while (oi < m && pre.xs[oi] <= x + merge_eps(x)) ++oi;
      nv[t] = (oi == 0) ? v[0] + sl[0] * (x - pre.xs[0])
                        : v[oi - 1] + sl[oi] * (x - pre.xs[oi - 1]);
      sright[t] = sl[oi];
      bool is_own_root = false;
      while (ri < mine.size() && mine[ri] <= x + merge_eps(x)) {
        if (std::abs(mine[ri] - x) <= merge_eps(x)) is_own_root = true;
        ++ri;
      }
      sv[t] = is_own_root || nv[t] == 0.0 ? 0 : sign_of(nv[t]);
    }

    // A segment is alive iff the pre-activation is positive on it; after
    // refinement every segment is sign-constant for this neuron.
    {
      const bool alive = sv[0] > 0 || (sv[0] == 0 && sl[0] < 0.0);
      out[0] = alive ? sl[0] : 0.0;
    }
    for (std::size_t t = 0; t + 1 < mm; ++t) {
      const bool alive = sv[t] > 0 || sv[t + 1] > 0;
      out[t + 1] = alive ? sright[t] : 0.0;
    }
    {
      const bool alive = sv[mm - 1] > 0 || (sv[mm - 1] == 0 && sl[m] > 0.0);
      out[mm] = alive ? sl[m] : 0.0;
    }
    post.val0[k] = sv[0] > 0 ? nv[0] : 0.0;
  }
  return post;
}

// First hidden layer straight from the input weights: sigma(w x + b).
LayerGrid first_layer(const NetworkParams& params) {
  const int n = params.width(1);
  const auto& w = params.weights[0];
  const auto& b = params.biases[0];

  struct Unit {
    double root, w;
    int k;
  };
  std::vector<Unit> units;
  std::vector<int> flat;  // neurons with w == 0 (possible under PointMassZero)
  units.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (w[static_cast<std::size_t>(k)] == 0.0) {
      flat.push_back(k);
      continue;
    }
    units.push_back({-b[static_cast<std::size_t>(k)] / w[static_cast<std::size_t>(k)],
                     w[static_cast<std::size_t>(k)], k});
  }
  std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& u) { return a.root < u.root; });

  LayerGrid g;
  for (const Unit& u : units)
    if (g.xs.empty() || u.root - g.xs.back() > merge_eps(g.xs.back())) g.xs.push_back(u.root);

  if (g.xs.empty()) {
    // Entirely knot-free layer: constants sigma(b_k).
    g.xs = {0.0};
    g.slopes.assign(static_cast<std::size_t>(n), std::vector<double>(2, 0.0));
    g.val0.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k)
      g.val0[static_cast<std::size_t>(k)] = std::max(0.0, b[static_cast<std::size_t>(k)]);
    return g;
  }

  const std::size_t mm = g.xs.size();
  g.slopes.assign(static_cast<std::size_t>(n), std::vector<double>(mm + 1, 0.0));
  g.val0.assign(static_cast<std::size_t>(n), 0.0);
  for (const Unit& u : units) {
    auto& row = g.slopes[static_cast<std::size_t>(u.k)];
    const auto it = std::lower_bound(g.xs.begin(), g.xs.end(), u.root - merge_eps(u.root));
    const std::size_t pos = static_cast<std::size_t>(it - g.xs.begin());
    if (u.w > 0.0) {
      for (std::size_t t = pos + 1; t <= mm; ++t) row[t] = u.w;
    } else {
      for (std::size_t t = 0; t <= pos; ++t) row[t] = u.w;
    }
    const double v0 = u.w * g.xs[0] + params.biases[0][static_cast<std::size_t>(u.k)];
    g.val0[static_cast<std::size_t>(u.k)] = v0 > 0.0 ? v0 : 0.0;
  }
  for (int k : flat)
    g.val0[static_cast<std::size_t>(k)] = std::max(0.0, b[static_cast<std::size_t>(k)]);
  return g;
}

LayerGrid propagate_grid(const NetworkParams& params) {
  LayerGrid g = first_layer(params);
  const int l = params.hidden_layers();
  for (int i = 2; i <= l; ++i) {
    const int n = params.width(i);
    const int n_prev = params.width(i - 1);
    const auto& w = params.weights[static_cast<std::size_t>(i - 1)];
    const auto& b = params.biases[static_cast<std::size_t>(i - 1)];
    const std::size_t mm = g.xs.size();

    LayerGrid pre;
    pre.xs = g.xs;
    pre.slopes.assign(static_cast<std::size_t>(n), std::vector<double>(mm + 1, 0.0));
    pre.val0.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
      auto& row = pre.slopes[static_cast<std::size_t>(k)];
      double v0 = b[static_cast<std::size_t>(k)];
      const double* wrow = &w[static_cast<std::size_t>(k) * n_prev];
      for (int j = 0; j < n_prev; ++j) {
        const double wj = wrow[j];
        if (wj == 0.0) continue;
        const auto& src = g.slopes[static_cast<std::size_t>(j)];
        for (std::size_t t = 0; t <= mm; ++t) row[t] += wj * src[t];
        v0 += wj * g.val0[static_cast<std::size_t>(j)];
      }
      pre.val0[static_cast<std::size_t>(k)] = v0;
    }
    g = apply_relu_layer(pre);
  }
  return g;
}

}  // namespace

PwlFunction network_output_spline(const NetworkParams& params) {
  const LayerGrid g = propagate_grid(params);
  const int l = params.hidden_layers();
  const auto& w_out = params.weights[static_cast<std::size_t>(l)];
  const std::size_t mm = g.xs.size();

  std::vector<double> slopes(mm + 1, 0.0);
  double v0 = params.biases[static_cast<std::size_t>(l)][0];
  for (std::size_t j = 0; j < w_out.size(); ++j) {
    const double wj = w_out[j];
    for (std::size_t t = 0; t <= mm; ++t) slopes[t] += wj * g.slopes[j][t];
    v0 += wj * g.val0[j];
  }
  return PwlFunction::from_breakpoints(g.xs, v0, std::move(slopes));
}

long network_knot_count(const NetworkParams& params) {
  return network_output_spline(params).knot_count();
}

double preservation_probability(int n_next, long m_prev) {
  if (n_next < 1) throw std::invalid_argument("preservation_probability: n_next >= 1");
  if (m_prev < 0) throw std::invalid_argument("preservation_probability: m_prev >= 0");
  const double p_keep = -std::expm1(-std::numbers::ln2 * n_next);  // 1 - 2^-n
  return std::pow(p_keep, static_cast<double>(m_prev));
}

double min_width_half_preservation(long m_prev) {
  if (m_prev < 1) throw std::invalid_argument("min_width_half_preservation: m_prev >= 1");
  const double q = -std::expm1(-std::numbers::ln2 / static_cast<double>(m_prev));  // 1 - 2^(-1/m)
  return -std::log2(q);
}

double min_width_half_preservation_series(long m_prev) {
  if (m_prev < 1) throw std::invalid_argument("min_width_half_preservation_series: m_prev >= 1");
  return std::log2(static_cast<double>(m_prev)) - std::log2(std::numbers::ln2);
}

namespace {

std::vector<double> merged_layer_knots(const std::vector<PwlFunction>& layer) {
  std::vector<double> all;
  for (const auto& f : layer)
    all.insert(all.end(), f.breakpoints().begin(), f.breakpoints().end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all)
    if (out.empty() || x - out.back() > merge_eps(out.back())) out.push_back(x);
  return out;
}

}  // namespace

RetentionCount knot_retention_trial(const NetworkParams& params, int layer_i) {
  if (layer_i < 2 || layer_i > params.hidden_layers())
    throw std::invalid_argument("knot_retention_trial: layer_i must be in [2, layers]");
  const PropagationTrace trace = propagate_exact(params);
  const auto prev = merged_layer_knots(trace.post[static_cast<std::size_t>(layer_i - 2)]);
  const auto next = merged_layer_knots(trace.post[static_cast<std::size_t>(layer_i - 1)]);

  RetentionCount rc;
  rc.total = static_cast<long>(prev.size());
  std::size_t j = 0;
  for (double x : prev) {
    while (j < next.size() && next[j] < x - merge_eps(x)) ++j;
    if (j < next.size() && std::abs(next[j] - x) <= merge_eps(x)) ++rc.retained;
  }
  return rc;
}

}  // namespace splinewalk
