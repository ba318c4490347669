#include "splinewalk/irw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "splinewalk/parallel.hpp"

namespace splinewalk {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

bool IrwPath::consistent(double rtol) const {
  if (xs.size() != ys.size() || slopes.size() != xs.size() + 1) return false;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (!(xs[k] < xs[k + 1])) return false;
    const double expect = ys[k] + slopes[k + 1] * (xs[k + 1] - xs[k]);
    const double scale = std::max({1.0, std::abs(ys[k + 1]), std::abs(expect)});
    if (std::abs(ys[k + 1] - expect) > rtol * scale) return false;
  }
  return true;
}

std::vector<double> random_walk(long long n, const DistributionSpec& step_dist,
                                double y0_prime, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_walk: n >= 1");
  std::vector<double> yp(static_cast<std::size_t>(n) + 1);
  yp[0] = y0_prime;
  for (long long k = 1; k <= n; ++k)
    yp[static_cast<std::size_t>(k)] = yp[static_cast<std::size_t>(k - 1)] + step_dist.sample(rng);
  return yp;
}

IrwPath integrate(std::span<const double> slope_seq, std::span<const double> xs, double y1) {
  if (slope_seq.size() != xs.size() + 1)
    throw std::invalid_argument("integrate: slope_seq.size() must be xs.size() + 1");
  IrwPath p;
  p.xs.assign(xs.begin(), xs.end());
  p.slopes.assign(slope_seq.begin(), slope_seq.end());
  p.ys.resize(xs.size());
  if (xs.empty()) return p;
  p.ys[0] = y1;
  for (std::size_t k = 1; k < xs.size(); ++k)
    p.ys[k] = p.ys[k - 1] + p.slopes[k] * (p.xs[k] - p.xs[k - 1]);
  return p;
}

IrwPath integrate_fixed(std::span<const double> slope_seq, double dx, double x1, double y1) {
  if (!(dx > 0.0)) throw std::invalid_argument("integrate_fixed: dx > 0");
  std::vector<double> xs(slope_seq.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = x1 + dx * static_cast<double>(k);
  return integrate(slope_seq, xs, y1);
}

IrwPath path_from_network(const CanonicalForm& cf) {
  IrwPath p;
  p.xs.assign(cf.knots().begin(), cf.knots().end());
  p.slopes.resize(p.xs.size() + 1);
  p.slopes[0] = cf.c1();
  for (std::size_t j = 0; j < p.xs.size(); ++j)
    p.slopes[j + 1] = p.slopes[j] + cf.steps()[j];
  p.ys.resize(p.xs.size());
  p.ys[0] = cf.c1() * p.xs[0] + cf.c0();
  for (std::size_t k = 1; k < p.xs.size(); ++k)
    p.ys[k] = p.ys[k - 1] + p.slopes[k] * (p.xs[k] - p.xs[k - 1]);
  return p;
}

long crossing_count(const IrwPath& path, bool include_ends) {
  long roots = 0;
  int last = 0;
  for (double y : path.ys) {
    const int s = sign_of(y);
    if (s == 0) continue;
    if (last != 0 && s != last) ++roots;
    last = s;
  }
  if (include_ends) {
    const double y1 = path.ys.front();
    const double yn = path.ys.back();
    const double s0 = path.slopes.front();
    const double sn = path.slopes.back();
    if (s0 != 0.0 && y1 != 0.0 && sign_of(y1) == sign_of(s0)) ++roots;
    if (sn != 0.0 && yn != 0.0 && sign_of(yn) != sign_of(sn)) ++roots;
  }
  return roots;
}

std::optional<FirstCrossing> first_crossing(const IrwPath& path) {
  int last = 0;
  for (std::size_t k = 0; k < path.ys.size(); ++k) {
    const int s = sign_of(path.ys[k]);
    if (s == 0) continue;
    if (last != 0 && s != last) {
      FirstCrossing fc;
      fc.index = static_cast<long long>(k) + 1;  // 1-based
      fc.abs_y_prev = std::abs(path.ys[k - 1]);
      fc.abs_yprime_prev = std::abs(path.slopes[k]);
      return fc;
    }
    last = s;
  }
  return std::nullopt;
}

namespace {

// Per-trial results concatenated in block order; assembly into CrossingStats
// happens once, serially, so output is independent of thread count.
struct CrossingPartial {
  std::vector<long long> first_index;
  std::vector<int> crossings;
  std::vector<double> pre_y;
  std::vector<double> pre_yp;

  void merge(const CrossingPartial& o) {
    first_index.insert(first_index.end(), o.first_index.begin(), o.first_index.end());
    crossings.insert(crossings.end(), o.crossings.begin(), o.crossings.end());
    pre_y.insert(pre_y.end(), o.pre_y.begin(), o.pre_y.end());
    pre_yp.insert(pre_yp.end(), o.pre_yp.begin(), o.pre_yp.end());
  }
};

struct TrialOutcome {
  int crossings = 0;
  long long first_index = 0;
  double pre_y = 0.0, pre_yp = 0.0;
};

// One homogeneous-IC fixed-step walk: y_1 = 0, y'_0 = 0, dx = 1.
TrialOutcome run_fixed_trial(long long steps, Rng& rng) {
  TrialOutcome out;
  double y = 0.0, yp = 0.0;
  int last = 0;
  for (long long k = 1; k < steps; ++k) {
    yp += rng.normal();
    const double y_next = y + yp;
    const int s = sign_of(y_next);
    if (s != 0) {
      if (last != 0 && s != last) {
        ++out.crossings;
        if (out.first_index == 0) {
          out.first_index = k + 1;
          out.pre_y = std::abs(y);
          out.pre_yp = std::abs(yp);
        }
      }
      last = s;
    }
    y = y_next;
  }
  return out;
}

// One homogeneous-IC walk over Cauchy(0,1) knots. Knots and slope
// increments come from the same per-neuron draws (x = -b/w, s = w2*|w|
// with w, b standard normal and w2 a sign), so the pair is dependent even
// though the marginals are Cauchy and normal; sampling them independently
// visibly flattens the crossing growth.
TrialOutcome run_cauchy_trial(long long steps, Rng& rng,
                              std::vector<std::pair<double, double>>& buf) {
  buf.resize(static_cast<std::size_t>(steps));
  for (auto& [x, s] : buf) {
    const double w = rng.normal();
    const double b = rng.normal();
    x = -b / w;
    s = rng.rademacher() * std::abs(w);
  }
  std::sort(buf.begin(), buf.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  TrialOutcome out;
  double y = 0.0, yp = 0.0;
  int last = 0;
  for (long long k = 1; k < steps; ++k) {
    yp += buf[static_cast<std::size_t>(k - 1)].second;
    const double y_next =
        y + yp * (buf[static_cast<std::size_t>(k)].first -
                  buf[static_cast<std::size_t>(k - 1)].first);
    const int s = sign_of(y_next);
    if (s != 0) {
      if (last != 0 && s != last) {
        ++out.crossings;
        if (out.first_index == 0) {
          out.first_index = k + 1;
          out.pre_y = std::abs(y);
          out.pre_yp = std::abs(yp);
        }
      }
      last = s;
    }
    y = y_next;
  }
  return out;
}

}  // namespace

CrossingStats crossing_statistics(WalkVariant variant, long long steps, long long trials,
                                  std::uint64_t seed) {
  if (steps < 2) throw std::invalid_argument("crossing_statistics: steps >= 2");
  if (trials < 1) throw std::invalid_argument("crossing_statistics: trials >= 1");

  CrossingPartial all = run_blocked<CrossingPartial>(
      trials, default_block(trials), [&](long long lo, long long hi, CrossingPartial& part) {
        part.first_index.reserve(static_cast<std::size_t>(hi - lo));
        part.crossings.reserve(static_cast<std::size_t>(hi - lo));
        std::vector<double> xbuf;
        for (long long t = lo; t < hi; ++t) {
          Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
          const TrialOutcome out = variant == WalkVariant::FixedStep
                                       ? run_fixed_trial(steps, rng)
                                       : run_cauchy_trial(steps, rng, xbuf);
          part.first_index.push_back(out.first_index);
          part.crossings.push_back(out.crossings);
          if (out.first_index != 0) {
            part.pre_y.push_back(out.pre_y);
            part.pre_yp.push_back(out.pre_yp);
          }
        }
      });

  CrossingStats stats;
  stats.trials = trials;
  stats.steps = steps;
  stats.first_index = std::move(all.first_index);
  stats.crossings = std::move(all.crossings);
  stats.pre_abs_y = std::move(all.pre_y);
  stats.pre_abs_yprime = std::move(all.pre_yp);
  std::sort(stats.pre_abs_y.begin(), stats.pre_abs_y.end());
  std::sort(stats.pre_abs_yprime.begin(), stats.pre_abs_yprime.end());
  for (int c : stats.crossings) stats.mean_crossings.add(static_cast<double>(c));
  return stats;
}

std::vector<double> CrossingStats::pmf() const {
  int max_c = 0;
  for (int c : crossings) max_c = std::max(max_c, c);
  std::vector<double> p(static_cast<std::size_t>(max_c) + 1, 0.0);
  for (int c : crossings) p[static_cast<std::size_t>(c)] += 1.0;
  for (double& v : p) v /= static_cast<double>(crossings.size());
  return p;
}

std::vector<double> CrossingStats::survival(std::span<const long long> ks) const {
  std::vector<long long> sorted_first;
  sorted_first.reserve(first_index.size());
  for (long long f : first_index) sorted_first.push_back(f == 0 ? steps + 1 : f);
  std::sort(sorted_first.begin(), sorted_first.end());
  std::vector<double> out(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto it = std::upper_bound(sorted_first.begin(), sorted_first.end(), ks[i]);
    out[i] = static_cast<double>(sorted_first.end() - it) / static_cast<double>(trials);
  }
  return out;
}

long long CrossingStats::never_crossed() const {
  long long n = 0;
  for (long long f : first_index) n += (f == 0);
  return n;
}

std::vector<CrossingCurvePoint> crossing_curve(WalkVariant variant,
                                               std::span<const long long> sizes,
                                               std::span<const long long> trials,
                                               std::uint64_t seed) {
  if (sizes.size() != trials.size())
    throw std::invalid_argument("crossing_curve: sizes/trials size mismatch");

  std::vector<CrossingCurvePoint> curve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const long long n = sizes[i];
    const long long t = trials[i];
    const std::uint64_t sub = mix_seed(seed, 0x5a110000ULL + i);
    struct Acc {
      Estimator est;
      void merge(const Acc& o) { est.merge(o.est); }
    };
    const Acc acc = run_blocked<Acc>(
        t, default_block(t), [&](long long lo, long long hi, Acc& a) {
          std::vector<double> xbuf;
          for (long long tr = lo; tr < hi; ++tr) {
            Rng rng(mix_seed(sub, static_cast<std::uint64_t>(tr)));
            const TrialOutcome out = variant == WalkVariant::FixedStep
                                         ? run_fixed_trial(n, rng)
                                         : run_cauchy_trial(n, rng, xbuf);
            a.est.add(static_cast<double>(out.crossings));
          }
        });
    curve[i].n = n;
    curve[i].mean = acc.est;
  }
  return curve;
}

QuantileVariance variance_by_quantile(long long n, long long trials, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("variance_by_quantile: n >= 2");
  const std::size_t cells = static_cast<std::size_t>(n);

  struct Acc {
    std::vector<double> sum, sum2;
    std::vector<long long> cnt;
    void init(std::size_t m) {
      if (sum.empty()) {
        sum.assign(m, 0.0);
        sum2.assign(m, 0.0);
        cnt.assign(m, 0);
      }
    }
    void merge(const Acc& o) {
      if (o.sum.empty()) return;
      init(o.sum.size());
      for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] += o.sum[i];
        sum2[i] += o.sum2[i];
        cnt[i] += o.cnt[i];
      }
    }
  };

  const NetConfig cfg = NetConfig::single_layer(
      static_cast<int>(n), normal_dist(), normal_dist(), rademacher_dist(), zero_dist());

  const Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        a.init(cells);
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(cfg, seed, static_cast<std::uint64_t>(t));
          const CanonicalForm cf = to_canonical(p).with_line(0.0, 0.0);
          const auto ys = cf.values_at_knots();
          const auto xs = cf.knots();
          for (std::size_t k = 0; k < xs.size(); ++k) {
            const double g = std::atan(xs[k]) / std::numbers::pi + 0.5;
            std::size_t cell = static_cast<std::size_t>(g * static_cast<double>(cells));
            if (cell >= cells) cell = cells - 1;
            a.sum[cell] += ys[k];
            a.sum2[cell] += ys[k] * ys[k];
            a.cnt[cell] += 1;
          }
        }
      });

  QuantileVariance qv;
  qv.center.resize(cells);
  qv.count.assign(acc.cnt.begin(), acc.cnt.end());
  qv.variance.resize(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    qv.center[j] = std::tan(std::numbers::pi *
                            ((static_cast<double>(j) + 0.5) / static_cast<double>(cells) - 0.5));
    if (acc.cnt[j] >= 2) {
      const double m = acc.sum[j] / static_cast<double>(acc.cnt[j]);
      qv.variance[j] = std::max(
          0.0, (acc.sum2[j] - static_cast<double>(acc.cnt[j]) * m * m) /
                   static_cast<double>(acc.cnt[j] - 1));
    }
  }
  return qv;
}

CorrelationSurface shifted_correlation(long long n, long long trials, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("shifted_correlation: n >= 2");
  const std::size_t m = static_cast<std::size_t>(n);

  CorrelationSurface cs;
  cs.grid.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    cs.grid[i] = std::tan(std::numbers::pi *
                          (static_cast<double>(i + 1) / static_cast<double>(m + 1) - 0.5));

  struct Acc {
    std::vector<double> sum;    // m
    std::vector<double> cross;  // upper triangle incl. diagonal, packed
    long long count = 0;
    void init(std::size_t mm) {
      if (sum.empty()) {
        sum.assign(mm, 0.0);
        cross.assign(mm * (mm + 1) / 2, 0.0);
      }
    }
    void merge(const Acc& o) {
      if (o.sum.empty()) return;
      init(o.sum.size());
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
      for (std::size_t i = 0; i < cross.size(); ++i) cross[i] += o.cross[i];
      count += o.count;
    }
  };

  const NetConfig cfg = NetConfig::single_layer(
      static_cast<int>(n), normal_dist(), normal_dist(), rademacher_dist(), zero_dist());

  const Acc acc = run_blocked<Acc>(
      trials, default_block(trials), [&](long long lo, long long hi, Acc& a) {
        a.init(m);
        for (long long t = lo; t < hi; ++t) {
          const NetworkParams p = sample_network(cfg, seed, static_cast<std::uint64_t>(t));
          const CanonicalForm cf = to_canonical(p);
          const std::vector<double> y = cf.eval_sorted(cs.grid);
          std::size_t idx = 0;
          for (std::size_t i = 0; i < m; ++i) {
            a.sum[i] += y[i];
            for (std::size_t j = i; j < m; ++j) a.cross[idx++] += y[i] * y[j];
          }
          a.count += 1;
        }
      });

  const double cnt = static_cast<double>(acc.count);
  std::vector<double> mean(m), var(m);
  {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < m; ++i) {
      mean[i] = acc.sum[i] / cnt;
      for (std::size_t j = i; j < m; ++j) {
        if (j == i) var[i] = acc.cross[idx] / cnt - mean[i] * mean[i];
        ++idx;
      }
    }
  }
  cs.corr.assign(m, std::vector<double>(m, 0.0));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double cov = acc.cross[idx++] / cnt - mean[i] * mean[j];
      const double denom = std::sqrt(var[i] * var[j]);
      const double c = denom > 0.0 ? cov / denom : 0.0;
      cs.corr[i][j] = c;
      cs.corr[j][i] = c;
    }
  }
  return cs;
}

}  // namespace splinewalk
