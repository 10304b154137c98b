#pragma once

// Independent test oracles. Everything here deliberately avoids the library
// code paths it is used to check: graphs by O(n^2) scan, harmonics by exact
// Legendre coefficient arrays, filtering by full dense eigendecomposition.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mfcn/graph.hpp"
#include "mfcn/rng.hpp"

namespace oracles {

inline mfcn::SparseGraph brute_force_eps_graph(const Eigen::MatrixXd& points, double eps) {
  const int n = static_cast<int>(points.rows());
  mfcn::SparseGraph g;
  g.n = n;
  g.neighbors.resize(n);
  const double r2 = eps * eps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && (points.row(i) - points.row(j)).squaredNorm() < r2)
        g.neighbors[i].push_back(j);
  return g;
}

inline mfcn::SparseGraph brute_force_knn_graph(const Eigen::MatrixXd& points, int k) {
  const int n = static_cast<int>(points.rows());
  std::vector<std::vector<int>> directed(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> dists;
    for (int j = 0; j < n; ++j)
      if (j != i) dists.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    std::sort(dists.begin(), dists.end());
    for (int t = 0; t < k; ++t) directed[i].push_back(dists[t].second);
  }
  mfcn::SparseGraph g;
  g.n = n;
  g.neighbors.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j : directed[i]) {
      g.neighbors[i].push_back(j);
      g.neighbors[j].push_back(i);
    }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

inline bool graphs_equal(const mfcn::SparseGraph& a, const mfcn::SparseGraph& b) {
  return a.n == b.n && a.neighbors == b.neighbors;
}

// Legendre polynomial P_l as an exact coefficient array (index = power).
inline std::vector<double> legendre_coeffs(int l) {
  std::vector<double> p0{1.0}, p1{0.0, 1.0};
  if (l == 0) return p0;
  if (l == 1) return p1;
  for (int ll = 2; ll <= l; ++ll) {
    std::vector<double> next(ll + 1, 0.0);
    for (std::size_t i = 0; i < p1.size(); ++i)
      next[i + 1] += (2.0 * ll - 1.0) * p1[i] / ll;
    for (std::size_t i = 0; i < p0.size(); ++i) next[i] -= (ll - 1.0) * p0[i] / ll;
    p0 = std::move(p1);
    p1 = std::move(next);
  }
  return p1;
}

inline std::vector<double> differentiate(std::vector<double> coeffs, int times) {
  for (int t = 0; t < times; ++t) {
    std::vector<double> d(std::max<std::size_t>(1, coeffs.size() - 1), 0.0);
    for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = coeffs[i] * static_cast<double>(i);
    coeffs = std::move(d);
  }
  return coeffs;
}

inline double eval_poly(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

// Direct Legendre-series harmonic in the probability-orthonormal convention:
// P_l^m via the m-th derivative of the exact P_l coefficients.
inline double slow_harmonic(int l, int m, const Eigen::Vector3d& p) {
  const int am = std::abs(m);
  const double ct = p.z();
  const double st2 = 1.0 - ct * ct;
  double plm = eval_poly(differentiate(legendre_coeffs(l), am), ct) *
               std::pow(std::max(0.0, st2), am / 2.0);
  double num = 1.0, den = 1.0;
  for (int i = l - am + 1; i <= l + am; ++i) den *= i;
  double scale = std::sqrt((2.0 * l + 1.0) * num / den);
  if (m != 0) scale *= std::sqrt(2.0);
  double value = scale * plm;
  if (m != 0) {
    const double phi = std::atan2(p.y(), p.x());
    value *= (m > 0) ? std::cos(am * phi) : std::sin(am * phi);
  }
  return value;
}

// Full dense w(L) x, the kappa = n reference for every filter path.
inline Eigen::VectorXd dense_filter_apply(const mfcn::GraphLaplacian& L,
                                          const std::function<double(double)>& w,
                                          const Eigen::VectorXd& x) {
  Eigen::MatrixXd dense(L.matrix);
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  Eigen::VectorXd diag = es.eigenvalues().unaryExpr(w);
  return es.eigenvectors() * diag.asDiagonal() * (es.eigenvectors().transpose() * x);
}

// Uniform random point cloud in [0, 1]^3 from the library's Rng stream.
inline Eigen::MatrixXd random_box_points(int n, std::uint64_t seed) {
  mfcn::Rng rng(seed);
  Eigen::MatrixXd pts(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) pts(i, j) = rng.uniform();
  return pts;
}

}  // namespace oracles
