#include "mfcn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "mfcn/errors.hpp"
#include "mfcn/io.hpp"
#include "mfcn/rng.hpp"

namespace mfcn {

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("n_grid entries must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw ConfigError("n_grid must be strictly increasing");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (kappa < 1) throw ConfigError("kappa must be >= 1");
  if (eigentrack < 1 || eigentrack + 1 > kappa)
    throw ConfigError("eigentrack must satisfy 1 <= eigentrack <= kappa - 1");
  if (depth < 1) throw ConfigError("depth must be >= 1");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  graph.validate();
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

Quantiles summarize(const std::vector<double>& values) {
  Quantiles q;
  q.median = percentile(values, 0.5);
  q.q25 = percentile(values, 0.25);
  q.q75 = percentile(values, 0.75);
  return q;
}

namespace {

enum class RunKind { Filter, Eigen, Multilayer };

std::string kind_name(RunKind kind) {
  switch (kind) {
    case RunKind::Filter: return "filter";
    case RunKind::Eigen: return "eigen";
    case RunKind::Multilayer: return "multilayer";
  }
  return "?";
}

TrialRow run_single_trial(const ExperimentConfig& cfg, int n, int trial, RunKind kind,
                          const NetworkSpec* net) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRow row;
  row.n = n;
  row.trial = trial;
  row.mode = cfg.graph.mode;
  row.seed = derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(trial), hash_tag("trial")});

  PointCloud cloud = sample_sphere(n, row.seed);
  GraphBuild build = build_graph(cloud, cfg.graph);
  row.eps_or_k = build.eps_or_k;
  row.connected = build.connectivity.connected;
  if (!row.connected) {
    row.skipped = true;
    row.skip_reason = "disconnected (" + std::to_string(build.connectivity.component_count) +
                      " components)";
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
  }

  SpectralBasis basis;
  try {
    basis = eigensolve(build.laplacian, std::min(cfg.kappa, n));
  } catch (const SolverError& e) {
    row.skipped = true;
    row.skip_reason = std::string("solver: ") + e.what();
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
  }

  const int tracked = std::min(cfg.eigentrack + 1, basis.kappa());
  row.eigenvalues.assign(basis.eigenvalues.data(), basis.eigenvalues.data() + tracked);

  const sphere::LimitKind limit = sphere::limit_kind_for(cfg.graph.mode);
  const Eigen::VectorXd x = sphere::project_expansion(cfg.signal, cloud);

  // Discretization error of the configured filter on P_n-scaled vectors.
  const Eigen::VectorXd filtered = apply_filter_exact(cfg.filter, basis, x);
  const sphere::HarmonicExpansion continuum = sphere::continuum_filter(cfg.filter, cfg.signal, limit);
  const Eigen::VectorXd projected = sphere::project_expansion(continuum, cloud);
  row.filter_error = (filtered - projected).norm();

  if (kind == RunKind::Multilayer) {
    // Per-depth error between the discrete forward pass and the projected
    // continuum forward pass, deepening one layer at a time.
    const int L = static_cast<int>(net->layers.size());
    row.depth_errors.resize(L);
    Eigen::MatrixXd X = x;
    std::vector<sphere::HarmonicExpansion> F{cfg.signal};
    NetworkSpec prefix;
    prefix.preset_tag = net->preset_tag;
    for (int l = 0; l < L; ++l) {
      X = layer_forward(net->layers[l], basis, X);
      NetworkSpec one;
      one.layers = {net->layers[l]};
      F = sphere::continuum_network_forward(one, F, limit);
      double worst = 0.0;
      for (int k = 0; k < X.cols(); ++k) {
        const Eigen::VectorXd target = sphere::project_expansion(F[k], cloud);
        worst = std::max(worst, (X.col(k) - target).norm());
      }
      row.depth_errors[l] = worst;
    }
  }

  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg, RunKind kind,
                                 const NetworkSpec* net) {
  cfg.validate();
  if (kind == RunKind::Multilayer) {
    if (net == nullptr) throw ArgumentError("multilayer run needs a network");
    net->validate();
    if (net->layers.front().C_in != 1)
      throw ConfigError("multilayer run drives a single-channel signal; C_in must be 1");
    for (const auto& layer : net->layers)
      if (layer.activation != Activation::Identity)
        throw NotSupportedError("multilayer convergence requires identity activations");
    WeightNorms norms = weight_norms(*net);
    for (std::size_t l = 0; l < norms.A1.size(); ++l) {
      const double product = norms.A1[l] * norms.A2[l];
      if (std::abs(product - 1.0) > 1e-9)
        throw ConfigError("layer " + std::to_string(l) + " gain product A1*A2 = " +
                          std::to_string(product) + "; normalize to 1 first");
    }
  }

  ConvergenceReport report;
  report.kind = kind_name(kind);
  report.config = cfg;

  // All (n, trial) tasks, then a deterministic sort afterwards; execution
  // order never affects results.
  std::vector<std::pair<int, int>> tasks;
  for (int n : cfg.n_grid)
    for (int t = 0; t < cfg.trials; ++t) tasks.emplace_back(n, t);
  report.rows.resize(tasks.size());

  int jobs = cfg.jobs == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.jobs;
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      report.rows[i] = run_single_trial(cfg, tasks[i].first, tasks[i].second, kind, net);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w]() {
        try {
          for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
            report.rows[i] = run_single_trial(cfg, tasks[i].first, tasks[i].second, kind, net);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::sort(report.rows.begin(), report.rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return a.n < b.n || (a.n == b.n && a.trial < b.trial);
  });

  // Continuum targets with multiplicity (2l+1 copies of each degree).
  const sphere::LimitKind limit = sphere::limit_kind_for(cfg.graph.mode);
  for (int l = 1; static_cast<int>(report.continuum_targets.size()) < cfg.eigentrack; ++l)
    for (int c = 0; c < 2 * l + 1 && static_cast<int>(report.continuum_targets.size()) < cfg.eigentrack; ++c)
      report.continuum_targets.push_back(sphere::continuum_eigenvalue(l, limit));

  // Per-n summaries + failure accounting.
  for (int n : cfg.n_grid) {
    SummaryRow s;
    s.n = n;
    std::vector<double> errs;
    std::vector<std::vector<double>> eigs(static_cast<std::size_t>(cfg.eigentrack));
    std::vector<double> pooled_abs;
    std::vector<std::vector<double>> depth_errs;
    std::vector<double> ratios;
    for (const TrialRow& row : report.rows) {
      if (row.n != n) continue;
      if (row.skipped) {
        ++s.skipped_trials;
        continue;
      }
      ++s.used_trials;
      if (std::isfinite(row.filter_error)) errs.push_back(row.filter_error);
      for (int i = 0; i < cfg.eigentrack && i + 1 < static_cast<int>(row.eigenvalues.size());
           ++i) {
        const double lam = row.eigenvalues[static_cast<std::size_t>(i) + 1];
        eigs[static_cast<std::size_t>(i)].push_back(lam);
        pooled_abs.push_back(std::abs(lam - report.continuum_targets[static_cast<std::size_t>(i)]));
      }
      if (!row.depth_errors.empty()) {
        depth_errs.resize(row.depth_errors.size());
        for (std::size_t d = 0; d < row.depth_errors.size(); ++d)
          depth_errs[d].push_back(row.depth_errors[d]);
        if (row.depth_errors.front() > 0.0)
          ratios.push_back(row.depth_errors.back() / row.depth_errors.front());
      }
    }
    if (2 * s.skipped_trials > cfg.trials)
      throw Error("more than 50% of trials failed at n = " + std::to_string(n));
    s.filter_error = summarize(errs);
    s.eigen_abs_error = summarize(pooled_abs);
    for (auto& per_index : eigs) s.eigen_medians.push_back(percentile(per_index, 0.5));
    for (auto& d : depth_errs) s.depth_error.push_back(summarize(d));
    s.depth_ratio = summarize(ratios);
    report.summary.push_back(std::move(s));
  }
  return report;
}

}  // namespace

std::string ConvergenceReport::raw_csv() const {
  std::ostringstream out;
  const int m = config.eigentrack + 1;
  out << "n,trial,mode,eps_or_k,connected,skipped,filter_error";
  for (int i = 1; i <= m; ++i) out << ",lambda_" << i;
  std::size_t depths = 0;
  for (const auto& row : rows) depths = std::max(depths, row.depth_errors.size());
  for (std::size_t d = 1; d <= depths; ++d) out << ",err_depth_" << d;
  out << '\n';
  for (const auto& row : rows) {
    out << row.n << ',' << row.trial << ',' << to_string(row.mode) << ','
        << format_double(row.eps_or_k) << ',' << (row.connected ? 1 : 0) << ','
        << (row.skipped ? 1 : 0) << ',' << format_double(row.filter_error);
    for (int i = 0; i < m; ++i) {
      out << ',';
      if (i < static_cast<int>(row.eigenvalues.size()))
        out << format_double(row.eigenvalues[static_cast<std::size_t>(i)]);
      else
        out << "nan";
    }
    for (std::size_t d = 0; d < depths; ++d) {
      out << ',';
      if (d < row.depth_errors.size())
        out << format_double(row.depth_errors[d]);
      else
        out << "nan";
    }
    out << '\n';
  }
  return out.str();
}

ConvergenceReport run_filter_convergence(const ExperimentConfig& cfg) {
  return run_experiment(cfg, RunKind::Filter, nullptr);
}

ConvergenceReport run_eigenvalue_convergence(const ExperimentConfig& cfg) {
  return run_experiment(cfg, RunKind::Eigen, nullptr);
}

ConvergenceReport run_multilayer_convergence(const ExperimentConfig& cfg,
                                             const NetworkSpec& net) {
  return run_experiment(cfg, RunKind::Multilayer, &net);
}

std::vector<sphere::HarmonicExpansion> harmonic_family(int max_degree) {
  std::vector<sphere::HarmonicExpansion> family;
  for (int l = 0; l <= max_degree; ++l)
    for (int m = -l; m <= l; ++m) family.push_back(sphere::HarmonicExpansion{{l, m, 1.0}});
  return family;
}

std::string BernsteinReport::raw_csv() const {
  std::ostringstream out;
  out << "n,trial,pair,inner,target,bound,violated\n";
  for (const auto& row : raw_rows) {
    out << static_cast<int>(row[0]) << ',' << static_cast<int>(row[1]) << ','
        << static_cast<int>(row[2]) << ',' << format_double(row[3]) << ','
        << format_double(row[4]) << ',' << format_double(row[5]) << ','
        << static_cast<int>(row[6]) << '\n';
  }
  return out.str();
}

BernsteinReport run_bernstein_check(
    const std::vector<int>& n_grid,
    const std::vector<std::pair<sphere::HarmonicExpansion, sphere::HarmonicExpansion>>& pairs,
    int trials, std::uint64_t base_seed) {
  if (n_grid.empty()) throw ArgumentError("bernstein check needs at least one n");
  if (pairs.empty()) throw ArgumentError("bernstein check needs at least one pair");
  if (trials < 1) throw ArgumentError("bernstein check needs trials >= 1");

  BernsteinReport report;
  report.n_grid = n_grid;
  report.trials = trials;
  report.base_seed = base_seed;

  struct PairInfo {
    std::string name;
    double target = 0.0;
    double l4_product = 0.0;
  };
  std::vector<PairInfo> infos;
  for (const auto& [f, g] : pairs) {
    PairInfo info;
    info.target = f.inner(g);
    info.l4_product = f.l4_norm() * g.l4_norm();
    std::ostringstream name;
    name << "<";
    bool first = true;
    for (const auto& [key, c] : f.terms()) {
      if (!first) name << "+";
      name << "Y(" << key.first << "," << key.second << ")";
      first = false;
      (void)c;
    }
    name << "|";
    first = true;
    for (const auto& [key, c] : g.terms()) {
      if (!first) name << "+";
      name << "Y(" << key.first << "," << key.second << ")";
      first = false;
      (void)c;
    }
    name << ">";
    info.name = name.str();
    infos.push_back(std::move(info));
  }

  for (int n : n_grid) {
    const double bound_factor = 6.0 * std::sqrt(std::log(static_cast<double>(n)) / n);
    std::vector<BernsteinPairResult> results(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      results[p].n = n;
      results[p].pair_name = infos[p].name;
      results[p].target = infos[p].target;
      results[p].bound = bound_factor * infos[p].l4_product;
      results[p].trials = trials;
    }
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = derive_seed(base_seed, {static_cast<std::uint64_t>(n),
                                                         static_cast<std::uint64_t>(trial),
                                                         hash_tag("bernstein")});
      PointCloud cloud = sample_sphere(n, seed);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        // <P_n f, P_n g> = (1/n) sum f(x_i) g(x_i)
        const Eigen::VectorXd pf = sphere::project_expansion(pairs[p].first, cloud);
        const Eigen::VectorXd pg = sphere::project_expansion(pairs[p].second, cloud);
        const double inner = pf.dot(pg);
        const double dev = std::abs(inner - infos[p].target);
        const bool violated = dev > results[p].bound;
        if (violated) ++results[p].violations;
        results[p].max_deviation = std::max(results[p].max_deviation, dev);
        report.raw_rows.push_back({static_cast<double>(n), static_cast<double>(trial),
                                   static_cast<double>(p), inner, infos[p].target,
                                   results[p].bound, violated ? 1.0 : 0.0});
      }
    }
    for (auto& r : results) {
      r.frequency = static_cast<double>(r.violations) / r.trials;
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace mfcn
