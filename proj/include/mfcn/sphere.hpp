#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfcn/network.hpp"
#include "mfcn/pointcloud.hpp"
#include "mfcn/spectral.hpp"

namespace mfcn::sphere {

// Analytic ground truth on the unit 2-sphere with the uniform probability
// measure. Harmonics are real and probability-measure orthonormal:
// <Y, Y>_{L2(mu)} = 1, i.e. surface-orthonormal harmonics scaled by
// sqrt(4 pi). Y(l=0) == 1 and Y(l=1, m=0) = sqrt(3) z.

/// Associated Legendre P_l^m(x) for m >= 0, no Condon-Shortley phase.
double assoc_legendre(int l, int m, double x);

/// Real spherical harmonic at a unit vector (|p| = 1 within 1e-9).
double eval_harmonic(int l, int m, const Eigen::Vector3d& point);

/// Which continuum operator the graph construction converges to.
enum class LimitKind { EpsLimit, KnnLimit };

std::string to_string(LimitKind kind);
LimitKind limit_kind_from_string(const std::string& s);
LimitKind limit_kind_for(GraphMode mode);

/// Eigenvalue of the limit operator on degree-l harmonics:
/// eps graphs: l(l+1)/(8 pi); knn graphs: 2 pi l(l+1).
double continuum_eigenvalue(int l, LimitKind kind);

/// Finite expansion sum c_{l,m} Y_l^m, the bandlimited signal class every
/// continuum computation here is exact on.
class HarmonicExpansion {
 public:
  HarmonicExpansion() = default;
  HarmonicExpansion(std::initializer_list<std::tuple<int, int, double>> terms);

  void add_term(int l, int m, double coeff);
  double coeff(int l, int m) const;
  bool empty() const { return terms_.empty(); }
  int max_degree() const;
  std::size_t term_count() const { return terms_.size(); }
  const std::map<std::pair<int, int>, double>& terms() const { return terms_; }

  double eval(const Eigen::Vector3d& point) const;
  /// ||f||_{L2(mu)} = sqrt(sum c^2) by orthonormality.
  double l2_norm() const;
  /// ||f||_{L4(mu)} by exact product quadrature sized to the band.
  double l4_norm() const;
  /// <f, g>_{L2(mu)} = sum over shared (l, m) of c_f * c_g.
  double inner(const HarmonicExpansion& other) const;

  HarmonicExpansion scaled(double factor) const;
  HarmonicExpansion plus(const HarmonicExpansion& other, double factor = 1.0) const;

 private:
  std::map<std::pair<int, int>, double> terms_;  // canonical (l, m) order
};

/// P_n applied to an expansion: entries f(x_i)/sqrt(n).
Eigen::VectorXd project_expansion(const HarmonicExpansion& f, const PointCloud& cloud);

/// w(L) f: each coefficient scaled by w(continuum_eigenvalue(l, kind)).
HarmonicExpansion continuum_filter(const SpectralFilter& w, const HarmonicExpansion& f,
                                   LimitKind kind);

/// Exact continuum forward pass of a linear network (all activations
/// identity) on bandlimited channels; NotSupportedError otherwise.
std::vector<HarmonicExpansion> continuum_network_forward(const NetworkSpec& net,
                                                         const std::vector<HarmonicExpansion>& F,
                                                         LimitKind kind);

/// Product quadrature on the sphere: Gauss-Legendre in cos(theta) times a
/// uniform trapezoid in phi, exact for band-limited integrands. Weights sum
/// to 1 (probability measure).
struct SphereQuadrature {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;

  /// Exact for products of harmonics of total degree <= 2*n_theta - 1 in
  /// cos(theta) and trigonometric degree < n_phi in phi.
  static SphereQuadrature product_rule(int n_theta, int n_phi);

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * f(points[i]);
    return acc;
  }
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace mfcn::sphere
