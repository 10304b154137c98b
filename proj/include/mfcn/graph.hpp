#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfcn/pointcloud.hpp"

namespace mfcn {

enum class GraphMode { Epsilon, Knn };

std::string to_string(GraphMode mode);
GraphMode graph_mode_from_string(const std::string& s);

/// How to build a graph from a cloud: either the paper-style schedule with a
/// multiplier, or an explicit radius / neighbor count. Exactly one of the
/// two routes is used per build.
struct GraphConfig {
  GraphMode mode = GraphMode::Epsilon;
  double scale_c = 0.0;  // 0 means the mode default (1.9 eps, 1.0 knn)
  std::optional<double> explicit_eps;
  std::optional<int> explicit_k;
  int intrinsic_dim = 2;

  double effective_scale() const;
  void validate() const;
};

/// Default schedule multipliers for the sphere benchmark.
inline constexpr double kDefaultEpsScale = 1.9;
inline constexpr double kDefaultKnnScale = 1.0;

/// Unweighted symmetric graph as sorted neighbor lists (no self loops).
struct SparseGraph {
  int n = 0;
  std::vector<std::vector<int>> neighbors;  // sorted ascending

  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
  std::vector<int> degrees() const;
  std::int64_t edge_count() const;  // undirected edges
  bool has_edge(int i, int j) const;
  /// Exact structural symmetry + zero diagonal; throws on violation.
  void validate() const;
};

/// Scaled graph Laplacian s * (D - A) in compressed row storage with sorted
/// column indices.
struct GraphLaplacian {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  double scaling_s = 0.0;
  GraphMode mode = GraphMode::Epsilon;
  std::uint64_t fingerprint = 0;

  int n() const { return static_cast<int>(matrix.rows()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x; }
  /// Certified upper bound on the spectral radius (max row abs sum).
  double gershgorin_bound() const;
};

/// Radius schedule eps = c * (log n / n)^(1/(d+4)). Requires n >= 2.
double eps_schedule(int n, int d, double c);

/// Neighbor-count schedule k = round(c * log(n)^(d/(d+4)) * n^(4/(d+4)))
/// clamped to [1, n-1]. knn_schedule_raw exposes the value before rounding.
double knn_schedule_raw(int n, int d, double c);
int knn_schedule(int n, int d, double c);

/// Edge {i,j} iff i != j and |x_i - x_j|^2 < eps^2 (strict). Backed by a
/// kd-tree; results equal the O(n^2) scan exactly.
SparseGraph build_eps_graph(const PointCloud& cloud, double eps);

/// Symmetric (union) k-NN graph; distance ties resolve by ascending index.
SparseGraph build_knn_graph(const PointCloud& cloud, int k);

/// Assembles s * (D - A) with s per mode:
///   eps: (d+2) / (v_d * n * eps^(d+2))
///   knn: (d+2) / (v_d * n) * (n * v_d / k)^(1 + 2/d)
/// where v_d = pi^(d/2) / Gamma(d/2 + 1).
GraphLaplacian assemble_laplacian(const SparseGraph& graph, GraphMode mode,
                                  int intrinsic_dim, double eps_or_k);

double unit_ball_volume(int d);

struct Connectivity {
  bool connected = false;
  int component_count = 0;
};

/// Breadth-first component count. Callers decide whether disconnection is
/// fatal; the convergence harness skips such trials.
Connectivity check_connected(const SparseGraph& graph);

/// Schedule resolution + build + Laplacian assembly in one step.
struct GraphBuild {
  SparseGraph graph;
  GraphLaplacian laplacian;
  double eps_or_k = 0.0;  // the resolved radius or neighbor count
  Connectivity connectivity;
};

GraphBuild build_graph(const PointCloud& cloud, const GraphConfig& config);

/// Edge-list dump "i j" (0-based, i < j, one per line) plus a JSON sidecar
/// {n, mode, eps_or_k, scaling_s} at path + ".json".
void dump_graph(const GraphBuild& build, const std::string& path);

}  // namespace mfcn
