#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "splinewalk/canonical.hpp"
#include "splinewalk/fit.hpp"
#include "splinewalk/gradients.hpp"
#include "splinewalk/irw.hpp"
#include "splinewalk/netgen.hpp"

namespace splinewalk {

// Every recipe is deterministic in (parameters, seed) and independent of the
// thread count; the CSV writers put the tool version, the resolved spec
// string, and the master seed into '#' header comments.

// ---------------------------------------------------------------- knots --
struct KnotsRecipe {
  std::vector<int> layers{1, 2, 3, 4};
  std::vector<int> widths{10, 20, 40, 80};
  long long trials = 200;
  std::uint64_t seed = 1;
  DistributionSpec dist = uniform_dist();  // every weight and bias

  std::string spec_string() const;
};
struct KnotsRow {
  int l = 0;
  int n = 0;
  long long trial = 0;
  long m = 0;
  double norm_err = 0.0;  // (m - n*l) / (n*l)
};
std::vector<KnotsRow> run_knots(const KnotsRecipe& r);
void write_knots_csv(const std::string& path, const KnotsRecipe& r,
                     const std::vector<KnotsRow>& rows,
                     const std::vector<std::string>& extra_comments = {});

// ---------------------------------------------------------- roots table --
struct RootsTableRecipe {
  long long n = 1000;
  long long trials = 2000;
  std::uint64_t seed = 7;

  std::string spec_string() const;
};
struct RootsTableRow {
  std::array<DistributionSpec, 4> dists;  // w1, b1, w2, b2
  Estimator roots_all;
  Estimator roots_span;
};
// The 18 studied weight/bias distribution combinations.
const std::vector<std::array<DistributionSpec, 4>>& roots_table_combos();
std::vector<RootsTableRow> run_roots_table(const RootsTableRecipe& r);
void write_roots_table_csv(const std::string& path, const RootsTableRecipe& r,
                           const std::vector<RootsTableRow>& rows,
                           const std::vector<std::string>& extra_comments = {});

// ------------------------------------------------------------ crossings --
struct CrossingsRecipe {
  long long min_steps = 4;
  long long max_steps = 16384;
  long long base_trials = 2000;  // per size; small sizes get more
  std::uint64_t seed = 3;
  FitWindow window_fixed{16.0, 1e18};
  FitWindow window_net{4.0, 1e18};

  std::vector<long long> sizes() const;
  std::vector<long long> trials_per_size() const;
  std::string spec_string() const;
};
struct CrossingsResult {
  std::vector<CrossingCurvePoint> fixed;
  std::vector<CrossingCurvePoint> net;
  FitResult fit_fixed;
  FitResult fit_net;
};
CrossingsResult run_crossings(const CrossingsRecipe& r);
void write_crossings_csv(const std::string& path, const CrossingsRecipe& r,
                         const CrossingsResult& res,
                         const std::vector<std::string>& extra_comments = {});

// ------------------------------------------------------------- survival --
struct SurvivalRecipe {
  long long steps = 100000;
  long long trials = 10000;
  std::uint64_t seed = 5;
  WalkVariant variant = WalkVariant::FixedStep;
  FitWindow tail_window{100.0, 10000.0};   // first-crossing index
  FitWindow cdf_y_window{0.02, 0.5};       // |y| below 1
  FitWindow cdf_yp_window{0.05, 0.5};      // |y'| below 1
  FitWindow pmf_window{4.0, 12.0};         // crossing counts

  std::string spec_string() const;
};
struct SurvivalResult {
  CrossingStats stats;
  FitResult tail;      // log survival vs log index
  FitResult cdf_y;     // log CDF vs log |y|
  FitResult cdf_yp;    // log CDF vs log |y'|
  FitResult pmf_log2;  // log2 pmf vs crossing count
};
SurvivalResult run_survival(const SurvivalRecipe& r);
void write_survival_csv(const std::string& path, const SurvivalRecipe& r,
                        const SurvivalResult& res,
                        const std::vector<std::string>& extra_comments = {});

// ---------------------------------------------------------------- fudge --
enum class FudgeMode { ScaleC0, ScaleC1, ScaleC0ZeroC1, ScaleC1ZeroC0 };
std::string fudge_mode_name(FudgeMode m);

struct FudgeRecipe {
  FudgeMode mode = FudgeMode::ScaleC0;
  std::vector<double> factors;  // empty -> powers of two, 2^-20..2^20 step 4
  long long n = 1000;
  long long trials = 2000;
  std::uint64_t seed = 11;

  std::vector<double> resolved_factors() const;
  std::string spec_string() const;
};
struct FudgePoint {
  double factor = 0.0;
  Estimator mean_roots;
};
std::vector<FudgePoint> run_fudge(const FudgeRecipe& r);
void write_fudge_csv(const std::string& path, const FudgeRecipe& r,
                     const std::vector<FudgePoint>& points,
                     const std::vector<std::string>& extra_comments = {});

// ------------------------------------------------------------- variance --
struct VarianceRecipe {
  long long n = 1000;
  long long trials = 2000;
  std::uint64_t seed = 13;
  FitWindow side_window{1.5, 100.0};    // |x| for both one-sided power fits
  FitWindow center_window{-0.9, 0.9};   // plain x for the exp fit

  std::string spec_string() const;
};
struct VarianceResult {
  QuantileVariance qv;
  FitResult left;    // log var vs log |x|, x < 0
  FitResult right;   // log var vs log x, x > 0
  FitResult center;  // ln var vs x
};
VarianceResult run_variance(const VarianceRecipe& r);
void write_variance_csv(const std::string& path, const VarianceRecipe& r,
                        const VarianceResult& res,
                        const std::vector<std::string>& extra_comments = {});

// ---------------------------------------------------------- correlation --
struct CorrelationRecipe {
  long long n = 100;
  long long trials = 10000;
  std::uint64_t seed = 17;

  std::string spec_string() const;
};
CorrelationSurface run_correlation(const CorrelationRecipe& r);
void write_correlation_csv(const std::string& path, const CorrelationRecipe& r,
                           const CorrelationSurface& res,
                           const std::vector<std::string>& extra_comments = {});

// -------------------------------------------------------- gradient dist --
struct GradientDistRecipe {
  int layers = 2;
  int width = 64;
  int layer_i = 2;
  std::vector<double> xs{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  long long trials = 200;
  std::uint64_t seed = 19;
  DistributionSpec weights = normal_dist();

  std::string spec_string() const;
};
GradientDistribution run_gradient_dist(const GradientDistRecipe& r);
void write_gradient_dist_csv(const std::string& path, const GradientDistRecipe& r,
                             const GradientDistribution& res,
                             const std::vector<std::string>& extra_comments = {});

// ------------------------------------------------------- order statistics --
enum class OrderStatDist { StandardNormal, Cauchy };

struct OrderStatsRecipe {
  OrderStatDist dist = OrderStatDist::Cauchy;
  long long n = 100;
  long long trials = 20000;
  std::uint64_t seed = 23;

  std::string spec_string() const;
};
struct OrderStatsResult {
  double empirical_median = 0.0;
  double closed_form = 0.0;
  // z-score of the count below the closed-form median against Binomial(T, 1/2).
  double binomial_z = 0.0;
  long long trials = 0;
};
OrderStatsResult run_order_stats(const OrderStatsRecipe& r);
void write_order_stats_csv(const std::string& path, const OrderStatsRecipe& r,
                           const OrderStatsResult& res,
                           const std::vector<std::string>& extra_comments = {});

// -------------------------------------------------------- decomposition --
struct DecompositionRecipe {
  long long n = 1000;
  long long trials = 3;
  std::uint64_t seed = 29;
  long long max_samples = 512;  // emitted points per trial

  std::string spec_string() const;
};
struct DecompositionTrace {
  std::uint64_t trial = 0;
  double c0 = 0.0, c1 = 0.0;
  std::vector<double> xs;    // subsampled knots
  std::vector<double> walk;  // zeroed-line walk values there
  long roots = 0;            // roots of the full network on R
  long intersections = 0;    // walk-vs-line crossings, computed independently
};
std::vector<DecompositionTrace> run_decomposition(const DecompositionRecipe& r);
void write_decomposition_csv(const std::string& path, const DecompositionRecipe& r,
                             const std::vector<DecompositionTrace>& res,
                             const std::vector<std::string>& extra_comments = {});

// -------------------------------------------------- equivalence check --
struct EquivalenceRecipe {
  long long seeds = 100;
  long long n = 1000;
  std::uint64_t seed = 1;

  std::string spec_string() const;
};
struct EquivalenceRow {
  std::uint64_t trial = 0;
  double max_abs_err = 0.0;
};
struct EquivalenceResult {
  std::vector<EquivalenceRow> rows;
  double max_abs_err = 0.0;
};
EquivalenceResult run_equivalence(const EquivalenceRecipe& r);
void write_equivalence_csv(const std::string& path, const EquivalenceRecipe& r,
                           const EquivalenceResult& res,
                           const std::vector<std::string>& extra_comments = {});

// JSON summary of named fits (optional companion to the CSVs).
void write_fits_json(const std::string& path,
                     const std::vector<std::pair<std::string, FitResult>>& fits);

}  // namespace splinewalk
