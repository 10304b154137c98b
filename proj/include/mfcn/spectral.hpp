#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfcn/graph.hpp"
#include "mfcn/pointcloud.hpp"

namespace mfcn {

/// The first kappa eigenpairs of a graph Laplacian, eigenvalues ascending,
/// eigenvector columns orthonormal. Sign convention: the first entry of each
/// column whose magnitude exceeds 1e-12 * max|entry| is positive.
struct SpectralBasis {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd vectors;      // n x kappa
  std::uint64_t source = 0;     // fingerprint of the Laplacian it came from

  int n() const { return static_cast<int>(vectors.rows()); }
  int kappa() const { return static_cast<int>(eigenvalues.size()); }
};

struct EigsOptions {
  double residual_tol = 1e-8;
  int dense_threshold = 2048;   // dense solver at or below this n
  int max_iterations = 0;       // 0 -> 10*kappa + 200
  std::uint64_t start_seed = 0; // folded into the deterministic start vector
  bool force_iterative = false;
};

/// Computes the kappa smallest eigenpairs. Dense symmetric diagonalization
/// for small n, Lanczos with full reorthogonalization otherwise. Throws
/// SolverError with a residual report when the budget runs out.
SpectralBasis eigensolve(const GraphLaplacian& L, int kappa, const EigsOptions& opts = {});

/// Power-iteration estimate of the spectral radius (deterministic start).
double estimate_spectral_radius(const GraphLaplacian& L, int iterations = 100);

enum class FilterKind { Heat, Wavelet, Constant, PolyInHeat };

/// Spectral response w: [0,inf) -> R with certified sup / Lipschitz bounds.
/// Built-ins: heat e^{-l}, wavelet e^{-2^{j-1} l} - e^{-2^j l}, constant c,
/// and polynomials in e^{-l}.
class SpectralFilter {
 public:
  static SpectralFilter heat();
  static SpectralFilter wavelet(int scale_j);
  static SpectralFilter constant(double c);
  static SpectralFilter poly_in_heat(std::vector<double> coeffs);

  double operator()(double lambda) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& lambdas) const;

  /// Upper bound on sup |w|; exact for heat (1), wavelet (1/4), constant.
  double sup_bound() const;
  /// Upper bound on the Lipschitz constant; exact for heat (1) and
  /// wavelet (2^{j-1}).
  double lip_bound() const;

  FilterKind kind() const { return kind_; }
  int scale() const { return scale_j_; }
  double constant_value() const { return value_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::string name() const;
  bool operator==(const SpectralFilter& other) const = default;

 private:
  SpectralFilter(FilterKind kind, int scale_j, double value, std::vector<double> coeffs)
      : kind_(kind), scale_j_(scale_j), value_(value), coeffs_(std::move(coeffs)) {}

  FilterKind kind_;
  int scale_j_;
  double value_;
  std::vector<double> coeffs_;
};

/// Graph Fourier coefficients <x, phi_i> for i = 1..kappa.
Eigen::VectorXd fourier_coeffs(const Eigen::VectorXd& x, const SpectralBasis& basis);

/// w(L) x = sum_{i<=kappa} w(lambda_i) <x, phi_i> phi_i. Components outside
/// the kappa-span are annihilated.
Eigen::VectorXd apply_filter_exact(const SpectralFilter& w, const SpectralBasis& basis,
                                   const Eigen::VectorXd& x);

/// Columns filtered independently.
Eigen::MatrixXd apply_filter_exact(const SpectralFilter& w, const SpectralBasis& basis,
                                   const Eigen::MatrixXd& X);

/// Output indexed [j] -> n x C matrix of filter j applied to every channel.
std::vector<Eigen::MatrixXd> filter_bank_apply(const std::vector<SpectralFilter>& bank,
                                               const SpectralBasis& basis,
                                               const Eigen::MatrixXd& X);

/// Truncated Chebyshev expansion of a response on [0, domain_max], with the
/// sup error certified on a dense grid.
struct ChebyshevApprox {
  int degree = 0;
  Eigen::VectorXd coefficients;  // c_0..c_p, plain T_k convention
  double domain_max = 0.0;
  double certified_sup_error = 0.0;

  static ChebyshevApprox fit(const std::function<double(double)>& response, int degree,
                             double domain_max);
  /// Smallest degree (up to max_degree) whose certified error meets tol.
  static ChebyshevApprox fit_to_tolerance(const std::function<double(double)>& response,
                                          double tol, double domain_max, int max_degree = 256);

  double evaluate(double lambda) const;
};

/// Default fitting domain for a Laplacian: power-iteration estimate with a
/// 1.05 safety factor, clamped to the certified Gershgorin bound.
double chebyshev_domain(const GraphLaplacian& L);

/// Clenshaw recurrence on mat-vec products only. Throws DomainError when the
/// power-iteration estimate of the spectral radius exceeds domain_max.
Eigen::VectorXd apply_filter_chebyshev(const ChebyshevApprox& approx, const GraphLaplacian& L,
                                       const Eigen::VectorXd& x);

}  // namespace mfcn
