// Timing harness comparing the serial path (one thread) against the OpenMP
// path on the two heaviest kernels. The deterministic seeding contract means
// both must produce identical results; this only measures throughput.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "splinewalk/experiments.hpp"

using namespace splinewalk;

namespace {

template <typename Fn>
double time_s(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  const int hw = omp_get_max_threads();
  std::printf("threads available: %d\n\n", hw);
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial(s)", "parallel", "speedup");

  {
    KnotsRecipe r;
    r.layers = {4};
    r.widths = {80};
    r.trials = 40;
    double mean_serial = 0.0, mean_parallel = 0.0;
    omp_set_num_threads(1);
    const double ts = time_s([&] {
      for (const auto& row : run_knots(r)) mean_serial += row.norm_err;
    });
    omp_set_num_threads(hw);
    const double tp = time_s([&] {
      for (const auto& row : run_knots(r)) mean_parallel += row.norm_err;
    });
    std::printf("%-28s %10.3f %10.3f %8.2f%s\n", "knots l=4 n=80 x40", ts, tp, ts / tp,
                mean_serial == mean_parallel ? "" : "  MISMATCH");
  }

  {
    SurvivalRecipe r;
    r.steps = 20000;
    r.trials = 2000;
    double mean_serial, mean_parallel;
    omp_set_num_threads(1);
    const double ts = time_s([&] { mean_serial = run_survival(r).stats.mean_crossings.mean; });
    omp_set_num_threads(hw);
    const double tp = time_s([&] { mean_parallel = run_survival(r).stats.mean_crossings.mean; });
    std::printf("%-28s %10.3f %10.3f %8.2f%s\n", "survival 2e4 steps x2e3", ts, tp, ts / tp,
                mean_serial == mean_parallel ? "" : "  MISMATCH");
  }

  {
    RootsTableRecipe r;
    r.n = 1000;
    r.trials = 500;
    double mean_serial = 0.0, mean_parallel = 0.0;
    omp_set_num_threads(1);
    const double ts = time_s([&] {
      for (const auto& row : run_roots_table(r)) mean_serial += row.roots_all.mean;
    });
    omp_set_num_threads(hw);
    const double tp = time_s([&] {
      for (const auto& row : run_roots_table(r)) mean_parallel += row.roots_all.mean;
    });
    std::printf("%-28s %10.3f %10.3f %8.2f%s\n", "roots-table n=1e3 x500", ts, tp, ts / tp,
                mean_serial == mean_parallel ? "" : "  MISMATCH");
  }

  return 0;
}
