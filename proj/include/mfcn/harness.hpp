#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfcn/graph.hpp"
#include "mfcn/network.hpp"
#include "mfcn/sphere.hpp"
#include "mfcn/spectral.hpp"

namespace mfcn {

/// What to run: sample sizes, trials per size, graph construction, filter and
/// signal, seeds. Trial seeds derive from (base_seed, n, trial) so results
/// are independent of execution order and parallelism.
struct ExperimentConfig {
  std::vector<int> n_grid{512, 1024, 2048, 4096};
  int trials = 10;
  GraphConfig graph;
  int kappa = 64;
  SpectralFilter filter = SpectralFilter::heat();
  sphere::HarmonicExpansion signal{{1, 0, 1.0}, {2, 0, 1.0}};
  std::uint64_t base_seed = 42;
  int eigentrack = 8;  // nonzero eigenvalues tracked per trial
  int depth = 3;       // multilayer runs
  int jobs = 1;        // 0 = hardware concurrency

  void validate() const;
};

/// One (n, trial) outcome. Skipped trials (disconnected graph or solver
/// failure) stay in the table with the reason recorded.
struct TrialRow {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  GraphMode mode = GraphMode::Epsilon;
  double eps_or_k = 0.0;
  bool connected = false;
  bool skipped = false;
  std::string skip_reason;
  double filter_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eigenvalues;    // first eigentrack+1, ascending
  std::vector<double> depth_errors;   // multilayer kind only
  double seconds = 0.0;               // wall time; report JSON only
};

struct Quantiles {
  double median = std::numeric_limits<double>::quiet_NaN();
  double q25 = std::numeric_limits<double>::quiet_NaN();
  double q75 = std::numeric_limits<double>::quiet_NaN();
};

/// Linear-interpolation quantile (p in [0,1]) of an unsorted sample.
double percentile(std::vector<double> values, double p);
Quantiles summarize(const std::vector<double>& values);

struct SummaryRow {
  int n = 0;
  int used_trials = 0;
  int skipped_trials = 0;
  Quantiles filter_error;
  Quantiles eigen_abs_error;          // pooled over tracked nonzero indices
  std::vector<double> eigen_medians;  // median of each tracked eigenvalue
  std::vector<Quantiles> depth_error; // per depth, multilayer kind
  Quantiles depth_ratio;              // error(depth)/error(1), multilayer
};

struct ConvergenceReport {
  std::string kind;  // "filter" | "eigen" | "multilayer"
  ExperimentConfig config;
  std::vector<TrialRow> rows;        // sorted by (n, trial)
  std::vector<SummaryRow> summary;   // per n, ascending
  std::vector<double> continuum_targets;  // eigenvalues with multiplicity

  /// Deterministic flat table of the raw trials; byte-identical on reruns.
  std::string raw_csv() const;
};

/// Samples, builds, eigensolves and measures the spectral-filter
/// discretization error per (n, trial); eigenvalues are recorded along the
/// way. Throws when more than half the trials at any n fail.
ConvergenceReport run_filter_convergence(const ExperimentConfig& cfg);

/// Same pipeline, summarized for eigenvalue tracking.
ConvergenceReport run_eigenvalue_convergence(const ExperimentConfig& cfg);

/// Per-depth discretization error of a linear network (identity activations,
/// per-layer gain product 1) against the exact continuum forward pass.
ConvergenceReport run_multilayer_convergence(const ExperimentConfig& cfg, const NetworkSpec& net);

struct BernsteinPairResult {
  int n = 0;
  std::string pair_name;
  double target = 0.0;  // exact inner product
  double bound = 0.0;   // 6 sqrt(log n / n) ||f||_4 ||g||_4
  int trials = 0;
  int violations = 0;
  double frequency = 0.0;
  double max_deviation = 0.0;
};

struct BernsteinReport {
  std::vector<int> n_grid;
  int trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<BernsteinPairResult> results;
  std::string raw_csv() const;
  std::vector<std::vector<double>> raw_rows;  // n, trial, pair, inner, target, bound, violated
};

/// Empirical violation frequency of the concentration bound
/// |<P_n f, P_n g> - <f, g>| <= 6 sqrt(log n / n) ||f||_4 ||g||_4
/// over fresh uniform clouds.
BernsteinReport run_bernstein_check(
    const std::vector<int>& n_grid,
    const std::vector<std::pair<sphere::HarmonicExpansion, sphere::HarmonicExpansion>>& pairs,
    int trials, std::uint64_t base_seed);

/// All single harmonics Y_l^m with l <= max_degree, canonical order.
std::vector<sphere::HarmonicExpansion> harmonic_family(int max_degree);

}  // namespace mfcn
