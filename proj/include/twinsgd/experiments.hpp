#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twinsgd/dataset.hpp"
#include "twinsgd/oracle.hpp"
#include "twinsgd/pegasos.hpp"
#include "twinsgd/sgtsvm.hpp"

namespace twinsgd {

/// Worker-pool width: TWINSGD_THREADS caps it, otherwise the number of
/// logical processors; never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Runs body(0..count-1) across the worker pool. Each trial must derive its
/// own RNG state from its index so parallel and serial execution agree.
void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& body);

/// Location where a 1-D classifier flips sign, by bisection over [lo, hi];
/// NaN when there is no flip in the interval.
double find_boundary_1d(const std::function<int(double)>& classify,
                        double lo = -6.0, double hi = 6.0, double tol = 1e-6);

enum class Algo { Sgtsvm, Pegasos, Both };

// --- stability experiment: repeated runs on fresh N(+/-sep, 1) data ---

struct StabilityConfig {
  std::size_t runs = 100;
  std::size_t m_per_class = 5000;
  double mean_sep = 2.0;
  std::uint64_t iterations = 200;  // fixed budget for both methods
  double c = 0.1;                  // all four twin penalties and the PEGASOS c
  std::uint64_t seed = 1;
  Algo algo = Algo::Both;
  /// The 1-D comparison needs an offset term in PEGASOS, otherwise its
  /// boundary is pinned at the origin.
  bool pegasos_bias = true;
  std::optional<std::pair<double, double>> mask_interval;  // invisible range
  int mask_label = -1;                                     // class the mask hides
};

struct StabilityRow {
  std::size_t run = 0;
  double sg_boundary = std::numeric_limits<double>::quiet_NaN();
  double sg_accuracy = std::numeric_limits<double>::quiet_NaN();
  double peg_boundary = std::numeric_limits<double>::quiet_NaN();
  double peg_accuracy = std::numeric_limits<double>::quiet_NaN();
};

std::vector<StabilityRow> run_stability(const StabilityConfig& cfg);
void write_stability_csv(std::ostream& out, std::span<const StabilityRow> rows);

struct SummaryStats {
  double mean = 0.0, stddev = 0.0;
  double min = 0.0, max = 0.0;
  std::size_t count = 0;
};
SummaryStats summarize(std::span<const double> values);

// --- convergence benchmark: iterations/time to reach each tolerance ---

struct BenchConfig {
  std::vector<double> tols = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::size_t runs = 10;
  std::uint64_t seed = 1;
  double c = 0.1;
  std::uint64_t max_iter = 1000000;
  bool pegasos_bias = true;
  Algo algo = Algo::Both;
};

struct BenchRow {
  std::string algo;
  double tol = 0.0;
  std::size_t run = 0;
  std::uint64_t iterations = 0;
  double seconds = 0.0;
  bool converged = false;
};

std::vector<BenchRow> run_bench(const Dataset& ds, const BenchConfig& cfg);
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

// --- cross-validation and grid search ---

struct CvConfig {
  std::size_t k = 10;
  TrainConfig train;
  bool use_kernel = false;
  double mu = 0.1;
  std::size_t reduced_size = 100;
  std::uint64_t seed = 1;
};

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double stddev = 0.0;
};

CvResult run_cv(const Dataset& ds, const CvConfig& cfg);

/// The default search grids: penalties from {2^i | i = -8..1}, tied
/// c1 = c3 and c2 = c4; Gaussian width from {2^i | i = -10..-1}.
std::vector<double> default_c_grid();
std::vector<double> default_mu_grid();

struct GridEntry {
  double c13 = 0.0, c24 = 0.0, mu = 0.0;
  double mean = 0.0, stddev = 0.0;
};

struct GridResult {
  GridEntry best;
  std::vector<GridEntry> table;
};

GridResult grid_search(const Dataset& ds, const CvConfig& cfg,
                       std::vector<double> c13_grid = default_c_grid(),
                       std::vector<double> c24_grid = default_c_grid(),
                       std::vector<double> mu_grid = default_mu_grid());

// --- objective-trace comparison against the batch oracle ---

struct CompareResult {
  std::vector<TraceRecord> trace;  // objective tracing forced on
  double f1_star = 0.0, f2_star = 0.0;
  std::uint64_t iterations = 0;
};

CompareResult run_compare(const Dataset& ds, TrainConfig cfg,
                          const KernelSpec* kernel = nullptr,
                          const OracleConfig& ocfg = {});
/// CSV shape: `iteration,f1,f2,f1_star,f2_star`.
void write_compare_csv(std::ostream& out, const CompareResult& res);

}  // namespace twinsgd
