#include "mfcn/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfcn/errors.hpp"
#include "mfcn/rng.hpp"

namespace mfcn {

namespace {

Eigen::VectorXd deterministic_unit_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  double norm = v.norm();
  if (norm < 1e-300) {
    v.setZero();
    v(0) = 1.0;
    norm = 1.0;
  }
  return v / norm;
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    auto col = vectors.col(c);
    const double thresh = 1e-12 * col.cwiseAbs().maxCoeff();
    for (int r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > thresh) {
        if (col(r) < 0) col = -col;
        break;
      }
    }
  }
}

void validate_basis(const GraphLaplacian& L, const SpectralBasis& basis, double residual_tol) {
  const int kappa = basis.kappa();
  Eigen::MatrixXd gram = basis.vectors.transpose() * basis.vectors;
  gram -= Eigen::MatrixXd::Identity(kappa, kappa);
  const double ortho = gram.cwiseAbs().maxCoeff();
  if (ortho > 1e-8)
    throw SolverError("eigenbasis lost orthonormality: max |Phi'Phi - I| = " +
                      std::to_string(ortho));

  const double scale = std::max(1.0, basis.eigenvalues(kappa - 1));
  Eigen::MatrixXd resid = L.matrix * basis.vectors -
                          basis.vectors * basis.eigenvalues.asDiagonal();
  double worst = 0.0;
  for (int i = 0; i < kappa; ++i) worst = std::max(worst, resid.col(i).norm());
  if (worst > residual_tol * scale) {
    std::ostringstream msg;
    msg << "eigenpair residual " << worst << " exceeds " << residual_tol << " * " << scale;
    throw SolverError(msg.str());
  }
  (void)residual_tol;
}

SpectralBasis dense_eigensolve(const GraphLaplacian& L, int kappa) {
  Eigen::MatrixXd dense(L.matrix);
  // Symmetrize defensively; assembly is exact but the solver wants it.
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw SolverError("dense eigendecomposition failed");
  SpectralBasis basis;
  basis.eigenvalues = solver.eigenvalues().head(kappa);
  basis.vectors = solver.eigenvectors().leftCols(kappa);
  basis.source = L.fingerprint;
  fix_signs(basis.vectors);
  return basis;
}

// Lanczos tridiagonalization with full reorthogonalization. Deterministic:
// the start vector is seeded by the Laplacian fingerprint (xor start_seed).
SpectralBasis lanczos_eigensolve(const GraphLaplacian& L, int kappa, const EigsOptions& opts) {
  const int n = L.n();
  const int budget = opts.max_iterations > 0 ? opts.max_iterations : 10 * kappa + 200;
  const int m_max = std::min(n, budget);
  const double tiny = 1e-13 * std::max(1.0, L.gershgorin_bound());

  Eigen::MatrixXd V(n, m_max);
  Eigen::VectorXd alpha(m_max), beta(m_max);
  V.col(0) = deterministic_unit_vector(n, derive_seed(L.fingerprint, {opts.start_seed}));

  int restarts = 0;
  int m = 0;
  double last_worst_bound = std::numeric_limits<double>::infinity();

  auto converged_count = [&](int steps, Eigen::VectorXd& ritz_out,
                             Eigen::MatrixXd& tvecs_out) -> bool {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      T(i, i) = alpha(i);
      if (i + 1 < steps) {
        T(i, i + 1) = beta(i);
        T(i + 1, i) = beta(i);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(T);
    if (ts.info() != Eigen::Success) throw SolverError("tridiagonal eigendecomposition failed");
    ritz_out = ts.eigenvalues();
    tvecs_out = ts.eigenvectors();
    const double scale = std::max(1.0, std::abs(ritz_out(steps - 1)));
    double worst = 0.0;
    for (int i = 0; i < kappa; ++i)
      worst = std::max(worst, std::abs(beta(steps - 1) * tvecs_out(steps - 1, i)));
    last_worst_bound = worst;
    return worst <= opts.residual_tol * scale;
  };

  Eigen::VectorXd ritz;
  Eigen::MatrixXd tvecs;
  bool ok = false;
  for (m = 0; m < m_max; ++m) {
    Eigen::VectorXd w = L.matrix * V.col(m);
    if (m > 0) w -= beta(m - 1) * V.col(m - 1);
    alpha(m) = V.col(m).dot(w);
    w -= alpha(m) * V.col(m);
    // Full reorthogonalization, two classical Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd proj = V.leftCols(m + 1).transpose() * w;
      w -= V.leftCols(m + 1) * proj;
    }
    double b = w.norm();
    beta(m) = b;  // revised to 0 below on breakdown
    if (m + 1 >= kappa + 2 && (m % 8 == 0 || m + 1 == m_max)) {
      if (converged_count(m + 1, ritz, tvecs)) {
        ok = true;
        ++m;
        break;
      }
    }
    if (m + 1 < m_max) {
      if (b <= tiny) {
        // Invariant subspace found; continue with a fresh direction.
        if (++restarts > 8) break;
        Eigen::VectorXd f =
            deterministic_unit_vector(n, derive_seed(L.fingerprint, {opts.start_seed,
                                                                     0xabcdULL + restarts}));
        for (int pass = 0; pass < 2; ++pass) {
          Eigen::VectorXd proj = V.leftCols(m + 1).transpose() * f;
          f -= V.leftCols(m + 1) * proj;
        }
        double fn = f.norm();
        if (fn < 1e-10) break;  // space exhausted
        beta(m) = 0.0;
        V.col(m + 1) = f / fn;
      } else {
        V.col(m + 1) = w / b;
      }
    }
  }

  if (!ok) {
    // One last check with everything we have.
    if (m >= kappa && converged_count(m, ritz, tvecs)) {
      ok = true;
    } else {
      std::ostringstream msg;
      msg << "Lanczos did not converge: n=" << n << " kappa=" << kappa << " steps=" << m
          << " budget=" << m_max << " worst residual bound=" << last_worst_bound
          << " tol=" << opts.residual_tol;
      throw SolverError(msg.str());
    }
  }

  SpectralBasis basis;
  basis.eigenvalues = ritz.head(kappa);
  basis.vectors = V.leftCols(m) * tvecs.leftCols(kappa);
  // Ritz vectors can drift from orthonormality at the last digit; tidy with
  // a thin QR against the computed order.
  for (int i = 0; i < kappa; ++i) {
    for (int j = 0; j < i; ++j)
      basis.vectors.col(i) -= basis.vectors.col(j).dot(basis.vectors.col(i)) * basis.vectors.col(j);
    basis.vectors.col(i).normalize();
  }
  basis.source = L.fingerprint;
  fix_signs(basis.vectors);
  return basis;
}

}  // namespace

SpectralBasis eigensolve(const GraphLaplacian& L, int kappa, const EigsOptions& opts) {
  const int n = L.n();
  if (kappa < 1 || kappa > n) throw ArgumentError("kappa must be in [1, n]");
  if (L.matrix.rows() != L.matrix.cols()) throw DimensionError("Laplacian is not square");

  SpectralBasis basis;
  const bool dense = !opts.force_iterative && (n <= opts.dense_threshold || kappa > n / 4);
  if (dense) {
    basis = dense_eigensolve(L, kappa);
  } else {
    basis = lanczos_eigensolve(L, kappa, opts);
  }
  validate_basis(L, basis, 1e-6);
  return basis;
}

double estimate_spectral_radius(const GraphLaplacian& L, int iterations) {
  const int n = L.n();
  Eigen::VectorXd v = deterministic_unit_vector(n, derive_seed(L.fingerprint, {hash_tag("radius")}));
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = L.matrix * v;
    double norm = w.norm();
    if (norm < 1e-300) return 0.0;
    lambda = v.dot(w);
    v = w / norm;
  }
  return std::abs(lambda);
}

SpectralFilter SpectralFilter::heat() { return SpectralFilter(FilterKind::Heat, 0, 0.0, {}); }

SpectralFilter SpectralFilter::wavelet(int scale_j) {
  if (scale_j < 1) throw ArgumentError("wavelet scale j must be >= 1");
  return SpectralFilter(FilterKind::Wavelet, scale_j, 0.0, {});
}

SpectralFilter SpectralFilter::constant(double c) {
  return SpectralFilter(FilterKind::Constant, 0, c, {});
}

SpectralFilter SpectralFilter::poly_in_heat(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ArgumentError("poly_in_heat needs at least one coefficient");
  return SpectralFilter(FilterKind::PolyInHeat, 0, 0.0, std::move(coeffs));
}

double SpectralFilter::operator()(double lambda) const {
  switch (kind_) {
    case FilterKind::Heat:
      return std::exp(-lambda);
    case FilterKind::Wavelet: {
      const double a = std::ldexp(1.0, scale_j_ - 1);  // 2^{j-1}
      return std::exp(-a * lambda) - std::exp(-2.0 * a * lambda);
    }
    case FilterKind::Constant:
      return value_;
    case FilterKind::PolyInHeat: {
      const double omega = std::exp(-lambda);
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * omega + coeffs_[i];
      return acc;
    }
  }
  return 0.0;
}

Eigen::VectorXd SpectralFilter::operator()(const Eigen::VectorXd& lambdas) const {
  Eigen::VectorXd out(lambdas.size());
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) out(i) = (*this)(lambdas(i));
  return out;
}

double SpectralFilter::sup_bound() const {
  switch (kind_) {
    case FilterKind::Heat:
      return 1.0;
    case FilterKind::Wavelet:
      return 0.25;  // max of x - x^2 on (0, 1]
    case FilterKind::Constant:
      return std::abs(value_);
    case FilterKind::PolyInHeat: {
      double sum = 0.0;
      for (double c : coeffs_) sum += std::abs(c);
      return sum;
    }
  }
  return 0.0;
}

double SpectralFilter::lip_bound() const {
  switch (kind_) {
    case FilterKind::Heat:
      return 1.0;
    case FilterKind::Wavelet:
      return std::ldexp(1.0, scale_j_ - 1);
    case FilterKind::Constant:
      return 0.0;
    case FilterKind::PolyInHeat: {
      // |dw/dl| = |p'(omega)| * omega <= sum_i i |c_i| on omega in (0, 1]
      double sum = 0.0;
      for (std::size_t i = 1; i < coeffs_.size(); ++i) sum += static_cast<double>(i) * std::abs(coeffs_[i]);
      return sum;
    }
  }
  return 0.0;
}

std::string SpectralFilter::name() const {
  switch (kind_) {
    case FilterKind::Heat:
      return "heat";
    case FilterKind::Wavelet:
      return "wavelet:" + std::to_string(scale_j_);
    case FilterKind::Constant:
      return "constant:" + std::to_string(value_);
    case FilterKind::PolyInHeat: {
      std::string s = "poly_in_heat:";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(coeffs_[i]);
      }
      return s;
    }
  }
  return "?";
}

Eigen::VectorXd fourier_coeffs(const Eigen::VectorXd& x, const SpectralBasis& basis) {
  if (x.size() != basis.n())
    throw DimensionError("fourier_coeffs: vector length " + std::to_string(x.size()) +
                         " != basis n " + std::to_string(basis.n()));
  return basis.vectors.transpose() * x;
}

Eigen::VectorXd apply_filter_exact(const SpectralFilter& w, const SpectralBasis& basis,
                                   const Eigen::VectorXd& x) {
  Eigen::VectorXd coeffs = fourier_coeffs(x, basis);
  coeffs.array() *= w(basis.eigenvalues).array();
  return basis.vectors * coeffs;
}

Eigen::MatrixXd apply_filter_exact(const SpectralFilter& w, const SpectralBasis& basis,
                                   const Eigen::MatrixXd& X) {
  if (X.rows() != basis.n()) throw DimensionError("apply_filter_exact: row count mismatch");
  Eigen::MatrixXd coeffs = basis.vectors.transpose() * X;
  coeffs.array().colwise() *= w(basis.eigenvalues).array();
  return basis.vectors * coeffs;
}

std::vector<Eigen::MatrixXd> filter_bank_apply(const std::vector<SpectralFilter>& bank,
                                               const SpectralBasis& basis,
                                               const Eigen::MatrixXd& X) {
  if (X.rows() != basis.n()) throw DimensionError("filter_bank_apply: row count mismatch");
  const Eigen::MatrixXd coeffs = basis.vectors.transpose() * X;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(bank.size());
  for (const auto& w : bank) {
    Eigen::MatrixXd scaled = coeffs;
    scaled.array().colwise() *= w(basis.eigenvalues).array();
    out.push_back(basis.vectors * scaled);
  }
  return out;
}

ChebyshevApprox ChebyshevApprox::fit(const std::function<double(double)>& response, int degree,
                                     double domain_max) {
  if (degree < 0) throw ArgumentError("chebyshev degree must be >= 0");
  if (domain_max <= 0.0) throw ArgumentError("chebyshev domain_max must be positive");
  const double half = 0.5 * domain_max;

  // Truncated Chebyshev series: projection coefficients approximated at many
  // more nodes than the degree (so the degree-0 coefficient is the Chebyshev
  // mean of the response, not a one-point sample).
  const int Nq = std::max(4 * (degree + 1), 256);
  std::vector<double> fvals(Nq);
  for (int j = 0; j < Nq; ++j) {
    double t = std::cos(M_PI * (j + 0.5) / Nq);
    fvals[j] = response(half * (t + 1.0));
  }
  ChebyshevApprox approx;
  approx.degree = degree;
  approx.domain_max = domain_max;
  approx.coefficients.resize(degree + 1);
  for (int k = 0; k <= degree; ++k) {
    double acc = 0.0;
    for (int j = 0; j < Nq; ++j) acc += fvals[j] * std::cos(M_PI * k * (j + 0.5) / Nq);
    approx.coefficients(k) = (k == 0 ? 1.0 : 2.0) * acc / Nq;
  }

  // Certify on a dense grid; 1.05 headroom plus an absolute floor for
  // floating-point noise in the comparison itself.
  const int grid = std::max(4096, 16 * (degree + 1));
  double sup_err = 0.0, sup_abs = 0.0;
  for (int g = 0; g <= grid; ++g) {
    double lam = domain_max * g / grid;
    double truth = response(lam);
    sup_abs = std::max(sup_abs, std::abs(truth));
    sup_err = std::max(sup_err, std::abs(approx.evaluate(lam) - truth));
  }
  approx.certified_sup_error = 1.05 * sup_err + 1e-13 * std::max(1.0, sup_abs);
  return approx;
}

ChebyshevApprox ChebyshevApprox::fit_to_tolerance(const std::function<double(double)>& response,
                                                  double tol, double domain_max, int max_degree) {
  if (tol <= 0.0) throw ArgumentError("chebyshev tolerance must be positive");
  for (int degree = 1; degree <= max_degree; degree = std::min(max_degree, degree * 2)) {
    ChebyshevApprox approx = fit(response, degree, domain_max);
    if (approx.certified_sup_error <= tol) return approx;
    if (degree == max_degree) break;
  }
  throw SolverError("chebyshev fit did not reach tolerance " + std::to_string(tol) +
                    " within degree " + std::to_string(max_degree));
}

double ChebyshevApprox::evaluate(double lambda) const {
  const double t = 2.0 * lambda / domain_max - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree; k >= 1; --k) {
    double b0 = 2.0 * t * b1 - b2 + coefficients(k);
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + coefficients(0);
}

double chebyshev_domain(const GraphLaplacian& L) {
  return std::min(1.05 * estimate_spectral_radius(L), L.gershgorin_bound());
}

Eigen::VectorXd apply_filter_chebyshev(const ChebyshevApprox& approx, const GraphLaplacian& L,
                                       const Eigen::VectorXd& x) {
  if (x.size() != L.n()) throw DimensionError("apply_filter_chebyshev: vector length mismatch");
  const double est = estimate_spectral_radius(L);
  if (est > approx.domain_max)
    throw DomainError("spectral radius estimate " + std::to_string(est) +
                      " exceeds chebyshev domain_max " + std::to_string(approx.domain_max));

  // Clenshaw with S = (2/domain_max) L - I applied via mat-vecs.
  const double scale = 2.0 / approx.domain_max;
  auto apply_s = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return scale * (L.matrix * v) - v;
  };
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(x.size());
  for (int k = approx.degree; k >= 1; --k) {
    Eigen::VectorXd b0 = 2.0 * apply_s(b1) - b2 + approx.coefficients(k) * x;
    b2.swap(b1);
    b1 = std::move(b0);
  }
  return apply_s(b1) - b2 + approx.coefficients(0) * x;
}

}  // namespace mfcn
