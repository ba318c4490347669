#include "splinewalk/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "splinewalk/parallel.hpp"

namespace splinewalk {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

CanonicalForm::CanonicalForm(std::vector<double> knots, std::vector<double> steps,
                             double c1, double c0)
    : knots_(std::move(knots)), steps_(std::move(steps)), c1_(c1), c0_(c0) {
  if (knots_.size() != steps_.size())
    throw std::invalid_argument("CanonicalForm: knots/steps size mismatch");
  if (knots_.empty()) throw std::invalid_argument("CanonicalForm: needs at least one knot");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("CanonicalForm: knots must be ascending");
  prefix_s_.resize(knots_.size());
  prefix_sx_.resize(knots_.size());
  double s = 0.0, sx = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    s += steps_[j];
    sx += steps_[j] * knots_[j];
    prefix_s_[j] = s;
    prefix_sx_[j] = sx;
  }
}

double CanonicalForm::eval(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
  double y = c1_ * x + c0_;
  if (j > 0) y += x * prefix_s_[j - 1] - prefix_sx_[j - 1];
  return y;
}

std::vector<double> CanonicalForm::values_at_knots() const {
  std::vector<double> ys(knots_.size());
  double y = c1_ * knots_[0] + c0_;
  double slope = c1_;
  ys[0] = y;
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    slope += steps_[k - 1];
    y += slope * (knots_[k] - knots_[k - 1]);
    ys[k] = y;
  }
  return ys;
}

std::vector<double> CanonicalForm::eval_sorted(std::span<const double> queries) const {
  std::vector<double> out(queries.size());
  std::size_t j = 0;
  double s = 0.0, sx = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const double x = queries[q];
    while (j < knots_.size() && knots_[j] <= x) {
      s = prefix_s_[j];
      sx = prefix_sx_[j];
      ++j;
    }
    out[q] = c1_ * x + c0_ + x * s - sx;
  }
  return out;
}

CanonicalForm CanonicalForm::with_line(double c1, double c0) const {
  return CanonicalForm(knots_, steps_, c1, c0);
}

CanonicalForm to_canonical(const NetworkParams& params) {
  if (params.hidden_layers() != 1)
    throw std::invalid_argument("to_canonical: single-layer networks only");
  const int n = params.width(1);
  const auto& w1 = params.weights[0];
  const auto& b1 = params.biases[0];
  const auto& w2 = params.weights[1];
  const double b2 = params.biases[1][0];

  std::vector<std::pair<double, double>> pairs;  // (knot, step)
  pairs.reserve(static_cast<std::size_t>(n));
  double c1 = 0.0, c0 = b2;
  for (int j = 0; j < n; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    if (w1[ju] == 0.0)
      throw std::invalid_argument("to_canonical: degenerate neuron with zero input weight");
    pairs.emplace_back(-b1[ju] / w1[ju], w2[ju] * std::abs(w1[ju]));
    if (w1[ju] < 0.0) {
      c1 += w2[ju] * w1[ju];
      c0 += w2[ju] * b1[ju];
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> knots, steps;
  knots.reserve(pairs.size());
  steps.reserve(pairs.size());
  for (const auto& [x, s] : pairs) {
    if (!knots.empty() && x == knots.back()) {
      steps.back() += s;  // exact tie: one knot, summed step
    } else {
      knots.push_back(x);
      steps.push_back(s);
    }
  }
  return CanonicalForm(std::move(knots), std::move(steps), c1, c0);
}

EndRoots end_segment_roots(const CanonicalForm& cf) {
  EndRoots er;
  const auto ys = cf.values_at_knots();
  const double y1 = ys.front();
  const double yn = ys.back();
  const double slope_final =
      cf.c1() + std::accumulate(cf.steps().begin(), cf.steps().end(), 0.0);
  er.left = cf.c1() != 0.0 && y1 != 0.0 && sign_of(cf.c1()) == sign_of(y1);
  er.right = slope_final != 0.0 && yn != 0.0 && sign_of(slope_final) != sign_of(yn);
  return er;
}

long root_count(const CanonicalForm& cf, RootDomain domain) {
  const auto ys = cf.values_at_knots();
  long roots = 0;
  int last = 0;
  for (double y : ys) {
    const int s = sign_of(y);
    if (s == 0) continue;
    if (last != 0 && s != last) ++roots;
    last = s;
  }
  if (domain == RootDomain::AllReals) {
    const EndRoots er = end_segment_roots(cf);
    roots += (er.left ? 1 : 0) + (er.right ? 1 : 0);
  }
  return roots;
}

namespace {

struct ParamAccum {
  // Moment sums for (s_1, x_1, c0, c1) of each trial.
  double n = 0;
  double sum_s = 0, sum_x = 0, sum_c0 = 0, sum_c1 = 0;
  double sum_ss = 0, sum_xx = 0, sum_c0c0 = 0, sum_c1c1 = 0;
  double sum_sx = 0, sum_sc1 = 0, sum_c0c1 = 0;

  void merge(const ParamAccum& o) {
    n += o.n;
    sum_s += o.sum_s;
    sum_x += o.sum_x;
    sum_c0 += o.sum_c0;
    sum_c1 += o.sum_c1;
    sum_ss += o.sum_ss;
    sum_xx += o.sum_xx;
    sum_c0c0 += o.sum_c0c0;
    sum_c1c1 += o.sum_c1c1;
    sum_sx += o.sum_sx;
    sum_sc1 += o.sum_sc1;
    sum_c0c1 += o.sum_c0c1;
  }
};

double corr_from_sums(double n, double sx, double sy, double sxx, double syy, double sxy) {
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

}  // namespace

ParamStats parameter_statistics(const NetConfig& cfg, long long trials, std::uint64_t seed) {
  if (cfg.layers != 1)
    throw std::invalid_argument("parameter_statistics: single-layer configs only");
  if (trials < 2) throw std::invalid_argument("parameter_statistics: trials >= 2");

  const ParamAccum acc = run_blocked<ParamAccum>(
      trials, default_block(trials), [&](long long lo, long long hi, ParamAccum& a) {
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(cfg, seed, static_cast<std::uint64_t>(t));
          const int n = p.width(1);
          double c1 = 0.0, c0 = p.biases[1][0];
          for (int j = 0; j < n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            if (p.weights[0][ju] < 0.0) {
              c1 += p.weights[1][ju] * p.weights[0][ju];
              c0 += p.weights[1][ju] * p.biases[0][ju];
            }
          }
          const double w1 = p.weights[0][0];
          const double s1 = p.weights[1][0] * std::abs(w1);
          const double x1 = -p.biases[0][0] / w1;
          a.n += 1;
          a.sum_s += s1;
          a.sum_x += x1;
          a.sum_c0 += c0;
          a.sum_c1 += c1;
          a.sum_ss += s1 * s1;
          a.sum_xx += x1 * x1;
          a.sum_c0c0 += c0 * c0;
          a.sum_c1c1 += c1 * c1;
          a.sum_sx += s1 * x1;
          a.sum_sc1 += s1 * c1;
          a.sum_c0c1 += c0 * c1;
        }
      });

  ParamStats st;
  st.trials = trials;
  st.corr_s_x = corr_from_sums(acc.n, acc.sum_s, acc.sum_x, acc.sum_ss, acc.sum_xx, acc.sum_sx);
  st.corr_s_c1 =
      corr_from_sums(acc.n, acc.sum_s, acc.sum_c1, acc.sum_ss, acc.sum_c1c1, acc.sum_sc1);
  st.corr_c0_c1 =
      corr_from_sums(acc.n, acc.sum_c0, acc.sum_c1, acc.sum_c0c0, acc.sum_c1c1, acc.sum_c0c1);
  const double n = acc.n;
  st.var_c0 = (acc.sum_c0c0 - acc.sum_c0 * acc.sum_c0 / n) / (n - 1);
  st.var_c1 = (acc.sum_c1c1 - acc.sum_c1 * acc.sum_c1 / n) / (n - 1);
  st.corr_se = 1.0 / std::sqrt(n);
  st.var_rel_se = std::sqrt(2.0 / n);
  return st;
}

EndRootProbability end_root_probability(const NetConfig& cfg, long long trials,
                                        std::uint64_t seed) {
  if (cfg.layers != 1)
    throw std::invalid_argument("end_root_probability: single-layer configs only");

  struct Acc {
    Estimator left, right;
    void merge(const Acc& o) {
      left.merge(o.left);
      right.merge(o.right);
    }
  };
  const Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(cfg, seed, static_cast<std::uint64_t>(t));
          const EndRoots er = end_segment_roots(to_canonical(p));
          a.left.add(er.left ? 1.0 : 0.0);
          a.right.add(er.right ? 1.0 : 0.0);
        }
      });
  return {acc.left, acc.right};
}

RatioStats cauchy_ratio_stats(const NetConfig& cfg, long long trials, std::uint64_t seed) {
  if (cfg.layers != 1)
    throw std::invalid_argument("cauchy_ratio_stats: single-layer configs only");
  if (trials < 4) throw std::invalid_argument("cauchy_ratio_stats: trials >= 4");

  struct Acc {
    std::vector<double> ratios;
    void merge(const Acc& o) { ratios.insert(ratios.end(), o.ratios.begin(), o.ratios.end()); }
  };
  Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        a.ratios.reserve(static_cast<std::size_t>(hi - lo));
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(cfg, seed, static_cast<std::uint64_t>(t));
          const int n = p.width(1);
          double c1 = 0.0, c0 = p.biases[1][0];
          for (int j = 0; j < n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            if (p.weights[0][ju] < 0.0) {
              c1 += p.weights[1][ju] * p.weights[0][ju];
              c0 += p.weights[1][ju] * p.biases[0][ju];
            }
          }
          a.ratios.push_back(c0 / c1);
        }
      });

  RatioStats rs;
  rs.trials = trials;
  rs.sorted_samples = std::move(acc.ratios);
  std::sort(rs.sorted_samples.begin(), rs.sorted_samples.end());
  const auto& r = rs.sorted_samples;
  const std::size_t m = r.size();
  rs.p_greater_one =
      static_cast<double>(r.end() - std::upper_bound(r.begin(), r.end(), 1.0)) /
      static_cast<double>(m);
  rs.median = r[m / 2];
  const double q25 = r[m / 4];
  const double q75 = r[(3 * m) / 4];
  rs.iqr_scale = (q75 - q25) / 2.0;
  return rs;
}

}  // namespace splinewalk
