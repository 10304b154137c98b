#include <cmath>

#include "doctest.h"
#include "mfcn/graph.hpp"
#include "mfcn/rng.hpp"
#include "mfcn/spectral.hpp"
#include "oracles.hpp"

using namespace mfcn;

namespace {

GraphLaplacian complete_graph_laplacian(int n) {
  SparseGraph g;
  g.n = n;
  g.neighbors.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.neighbors[i].push_back(j);
  // eps chosen so s = 1 for d = 2: 4/(pi n eps^4) = 1
  const double eps = std::pow(4.0 / (M_PI * n), 0.25);
  return assemble_laplacian(g, GraphMode::Epsilon, 2, eps);
}

GraphLaplacian random_geometric_laplacian(int n, std::uint64_t seed, double eps = 0.35) {
  Eigen::MatrixXd pts = oracles::random_box_points(n, seed);
  PointCloud cloud(pts, 3, "box");
  SparseGraph g = build_eps_graph(cloud, eps);
  return assemble_laplacian(g, GraphMode::Epsilon, 3, eps);
}

// Same graph, spectrum rescaled into [0, target] (Gershgorin certified).
GraphLaplacian rescaled_laplacian(int n, std::uint64_t seed, double target) {
  GraphLaplacian L = random_geometric_laplacian(n, seed);
  const double bound = L.gershgorin_bound();
  if (bound > 0.0) {
    L.matrix *= target / bound;
    L.scaling_s *= target / bound;
  }
  return L;
}

}  // namespace

TEST_CASE("eigensolve on K3 gives (0, 3, 3)") {
  GraphLaplacian L = complete_graph_laplacian(3);
  REQUIRE(L.scaling_s == doctest::Approx(1.0).epsilon(1e-12));
  SpectralBasis basis = eigensolve(L, 3);
  CHECK(std::abs(basis.eigenvalues(0)) < 1e-10);
  CHECK(basis.eigenvalues(1) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(basis.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("eigensolve on the two-vertex path gives the closed form") {
  SparseGraph pair;
  pair.n = 2;
  pair.neighbors = {{1}, {0}};
  GraphLaplacian L;
  L.mode = GraphMode::Epsilon;
  L.scaling_s = 1.0;
  L.matrix.resize(2, 2);
  std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 1.0}};
  L.matrix.setFromTriplets(t.begin(), t.end());
  L.fingerprint = 42;

  SpectralBasis basis = eigensolve(L, 2);
  CHECK(std::abs(basis.eigenvalues(0)) < 1e-12);
  CHECK(basis.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
  const double r = 1.0 / std::sqrt(2.0);
  // Sign convention: first nonzero entry positive.
  CHECK(basis.vectors(0, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(basis.vectors(1, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(basis.vectors(0, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(basis.vectors(1, 1) == doctest::Approx(-r).epsilon(1e-12));
}

TEST_CASE("eigensolve validates arguments and budget") {
  GraphLaplacian L = random_geometric_laplacian(60, 3);
  CHECK_THROWS_AS(eigensolve(L, 0), ArgumentError);
  CHECK_THROWS_AS(eigensolve(L, 61), ArgumentError);

  EigsOptions tiny_budget;
  tiny_budget.force_iterative = true;
  tiny_budget.max_iterations = 5;
  CHECK_THROWS_AS(eigensolve(L, 20, tiny_budget), SolverError);
}

TEST_CASE("iterative and dense paths agree") {
  GraphLaplacian L = random_geometric_laplacian(250, 7);
  SpectralBasis dense = eigensolve(L, 12);
  EigsOptions it;
  it.force_iterative = true;
  SpectralBasis lanczos = eigensolve(L, 12, it);
  for (int i = 0; i < 12; ++i)
    CHECK(lanczos.eigenvalues(i) == doctest::Approx(dense.eigenvalues(i)).epsilon(1e-8));
}

TEST_CASE("filter outputs are basis-independent across solver starts") {
  GraphLaplacian L = random_geometric_laplacian(300, 11);
  EigsOptions a, b;
  a.force_iterative = b.force_iterative = true;
  a.start_seed = 1;
  b.start_seed = 99;
  SpectralBasis ba = eigensolve(L, 16, a);
  SpectralBasis bb = eigensolve(L, 16, b);

  Rng rng(5);
  Eigen::VectorXd x(L.n());
  for (int i = 0; i < x.size(); ++i) x(i) = rng.normal();
  // Compare operator outputs, not eigenvectors: degenerate eigenspaces may
  // rotate, but w(L)x depends only on the operator.
  Eigen::VectorXd ya = apply_filter_exact(SpectralFilter::heat(), ba, x);
  Eigen::VectorXd yb = apply_filter_exact(SpectralFilter::heat(), bb, x);
  CHECK((ya - yb).norm() <= 1e-7 * x.norm());
}

TEST_CASE("fourier_coeffs recovers orthonormal coordinates") {
  GraphLaplacian L = random_geometric_laplacian(80, 2);
  SpectralBasis basis = eigensolve(L, 10);

  Eigen::VectorXd e0 = fourier_coeffs(basis.vectors.col(0), basis);
  CHECK(std::abs(e0(0) - 1.0) < 1e-10);
  for (int i = 1; i < 10; ++i) CHECK(std::abs(e0(i)) < 1e-10);

  CHECK(fourier_coeffs(Eigen::VectorXd::Zero(80), basis).norm() == 0.0);

  // Parseval on the span
  Rng rng(8);
  Eigen::VectorXd c(10);
  for (int i = 0; i < 10; ++i) c(i) = rng.normal();
  Eigen::VectorXd x = basis.vectors * c;
  Eigen::VectorXd back = fourier_coeffs(x, basis);
  CHECK(std::abs(back.squaredNorm() - x.squaredNorm()) < 1e-10);

  CHECK_THROWS_AS(fourier_coeffs(Eigen::VectorXd::Zero(81), basis), DimensionError);
}

TEST_CASE("apply_filter_exact on eigenvectors and full bases") {
  GraphLaplacian L = random_geometric_laplacian(60, 9);
  const int n = L.n();
  SpectralBasis full = eigensolve(L, n);

  // Eigenvector case: w(L) phi = w(lambda) phi
  SpectralFilter heat = SpectralFilter::heat();
  for (int i : {0, 3, n - 1}) {
    Eigen::VectorXd phi = full.vectors.col(i);
    Eigen::VectorXd out = apply_filter_exact(heat, full, phi);
    Eigen::VectorXd expect = std::exp(-full.eigenvalues(i)) * phi;
    CHECK((out - expect).norm() < 1e-10);
  }

  // Completeness: w == 1 at kappa = n reproduces x
  Rng rng(3);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.normal();
  Eigen::VectorXd same = apply_filter_exact(SpectralFilter::constant(1.0), full, x);
  CHECK((same - x).norm() <= 1e-8 * x.norm());

  // Heat on the constant vector is nearly identity (constants span the
  // kernel of every graph Laplacian, so lambda = 0 and w(0) = 1).
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd smoothed = apply_filter_exact(heat, full, ones);
  CHECK((smoothed - ones).norm() <= 1e-8 * ones.norm());
}

TEST_CASE("filter sup and Lipschitz bounds are certified") {
  CHECK(SpectralFilter::heat().sup_bound() == 1.0);
  CHECK(SpectralFilter::heat().lip_bound() == 1.0);
  CHECK(SpectralFilter::wavelet(1).sup_bound() == doctest::Approx(0.25));
  CHECK(SpectralFilter::wavelet(3).lip_bound() == doctest::Approx(4.0));
  CHECK(SpectralFilter::constant(-2.5).sup_bound() == doctest::Approx(2.5));
  CHECK(SpectralFilter::constant(7.0).lip_bound() == 0.0);

  // Bounds dominate samples of |w| and |w'| (finite differences).
  for (const auto& w : {SpectralFilter::heat(), SpectralFilter::wavelet(2),
                        SpectralFilter::poly_in_heat({0.3, -0.5, 0.2})}) {
    double sup = 0.0, lip = 0.0;
    const double h = 1e-6;
    for (int i = 0; i <= 4000; ++i) {
      double lam = 12.0 * i / 4000.0;
      sup = std::max(sup, std::abs(w(lam)));
      lip = std::max(lip, std::abs(w(lam + h) - w(lam)) / h);
    }
    CHECK(sup <= w.sup_bound() * (1 + 1e-9));
    CHECK(lip <= w.lip_bound() * (1 + 1e-4) + 1e-9);
  }

  // Wavelet peak value 1/4 is attained (at lambda = ln 2 / 2^{j-1}).
  CHECK(SpectralFilter::wavelet(1)(std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("nonexpansiveness: sup_bound <= 1 filters contract differences") {
  Rng rng(77);
  int checked = 0;
  for (std::uint64_t g = 0; g < 25; ++g) {
    GraphLaplacian L = random_geometric_laplacian(40, 100 + g);
    SpectralBasis basis = eigensolve(L, 40);
    const std::vector<SpectralFilter> filters{
        SpectralFilter::heat(), SpectralFilter::wavelet(1 + static_cast<int>(g % 3)),
        SpectralFilter::constant(0.9), SpectralFilter::poly_in_heat({0.25, 0.25, 0.25})};
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::VectorXd x(40), y(40);
      for (int i = 0; i < 40; ++i) {
        x(i) = rng.normal();
        y(i) = rng.normal();
      }
      const SpectralFilter& w = filters[rep % filters.size()];
      REQUIRE(w.sup_bound() <= 1.0);
      Eigen::VectorXd dx = apply_filter_exact(w, basis, x) - apply_filter_exact(w, basis, y);
      CHECK(dx.norm() <= (x - y).norm() + 1e-10);
      ++checked;
    }
  }
  CHECK(checked == 250);
}

TEST_CASE("apply_filter_exact is linear") {
  GraphLaplacian L = random_geometric_laplacian(50, 21);
  SpectralBasis basis = eigensolve(L, 20);
  Rng rng(9);
  Eigen::VectorXd x(50), y(50);
  for (int i = 0; i < 50; ++i) {
    x(i) = rng.normal();
    y(i) = rng.normal();
  }
  SpectralFilter w = SpectralFilter::wavelet(2);
  Eigen::VectorXd lhs = apply_filter_exact(w, basis, (2.5 * x - 0.7 * y).eval());
  Eigen::VectorXd rhs = 2.5 * apply_filter_exact(w, basis, x) - 0.7 * apply_filter_exact(w, basis, y);
  CHECK((lhs - rhs).norm() <= 1e-10 * (lhs.norm() + 1.0));
}

TEST_CASE("filter_bank_apply indexes (j, k) and telescopes") {
  GraphLaplacian L = random_geometric_laplacian(70, 31);
  const int n = L.n();
  SpectralBasis full = eigensolve(L, n);

  // J = 1 identity bank reproduces X
  Eigen::MatrixXd X(n, 2);
  Rng rng(4);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
  }
  auto ident = filter_bank_apply({SpectralFilter::constant(1.0)}, full, X);
  REQUIRE(ident.size() == 1);
  CHECK((ident[0] - X).norm() <= 1e-8 * X.norm());

  // Wavelet bank on an eigenvector: channel j is the scalar response.
  const int J = 4;
  std::vector<SpectralFilter> bank;
  for (int j = 1; j <= J; ++j) bank.push_back(SpectralFilter::wavelet(j));
  Eigen::MatrixXd Phi = full.vectors.col(5);
  auto waved = filter_bank_apply(bank, full, Phi);
  const double lam = full.eigenvalues(5);
  for (int j = 1; j <= J; ++j) {
    const double a = std::ldexp(1.0, j - 1);
    const double scalar = std::exp(-a * lam) - std::exp(-2.0 * a * lam);
    CHECK((waved[j - 1] - scalar * Phi).norm() < 1e-10);
  }

  // Telescoping: sum_j wavelet_j = e^{-l} - e^{-2^J l}
  Eigen::VectorXd x = X.col(0);
  auto parts = filter_bank_apply(bank, full, x);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  for (const auto& part : parts) sum += part.col(0);
  Eigen::VectorXd telescoped = oracles::dense_filter_apply(
      L, [&](double l) { return std::exp(-l) - std::exp(-std::ldexp(1.0, J) * l); }, x);
  CHECK((sum - telescoped).norm() <= 1e-10 * (1.0 + x.norm()));
}

TEST_CASE("chebyshev: constant response is exact") {
  GraphLaplacian L = random_geometric_laplacian(90, 41);
  auto approx = ChebyshevApprox::fit([](double) { return 0.75; }, 0, chebyshev_domain(L));
  Rng rng(12);
  Eigen::VectorXd x(90);
  for (int i = 0; i < 90; ++i) x(i) = rng.normal();
  Eigen::VectorXd out = apply_filter_chebyshev(approx, L, x);
  CHECK((out - 0.75 * x).norm() == 0.0);
  CHECK(approx.certified_sup_error < 1e-12);
}

TEST_CASE("chebyshev heat filter matches dense filtering on random graphs") {
  // degree 30 on [0, 12]; the certified error must also dominate observed.
  auto approx = ChebyshevApprox::fit([](double l) { return std::exp(-l); }, 30, 12.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 120 + static_cast<int>(seed) * 8;
    GraphLaplacian L = rescaled_laplacian(n, 500 + seed, 10.0);
    REQUIRE(estimate_spectral_radius(L) <= 12.0);
    Rng rng(seed);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.normal();
    Eigen::VectorXd cheb = apply_filter_chebyshev(approx, L, x);
    Eigen::VectorXd exact = oracles::dense_filter_apply(L, [](double l) { return std::exp(-l); }, x);
    CHECK((cheb - exact).norm() <= 1e-6 * x.norm());
    CHECK((cheb - exact).norm() <= approx.certified_sup_error * x.norm() + 1e-12);
  }
}

TEST_CASE("chebyshev degree-0 truncation equals the chebyshev mean") {
  // c_0 = (1/pi) int_0^pi e^{-6 - 6 cos t} dt = e^{-6} I_0(6) = 0.16665743...
  auto approx = ChebyshevApprox::fit([](double l) { return std::exp(-l); }, 0, 12.0);
  CHECK(approx.coefficients(0) == doctest::Approx(0.16665743263981658).epsilon(1e-9));
  GraphLaplacian L = rescaled_laplacian(40, 61, 10.0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(40);
  Eigen::VectorXd out = apply_filter_chebyshev(approx, L, x);
  CHECK((out - approx.coefficients(0) * x).norm() < 1e-12);
}

TEST_CASE("chebyshev domain violations raise DomainError") {
  GraphLaplacian L = random_geometric_laplacian(80, 71);
  const double radius = estimate_spectral_radius(L);
  auto small = ChebyshevApprox::fit([](double l) { return std::exp(-l); }, 10, radius * 0.5);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(80);
  CHECK_THROWS_AS(apply_filter_chebyshev(small, L, x), DomainError);
}

TEST_CASE("fit_to_tolerance certifies the requested tolerance") {
  auto approx = ChebyshevApprox::fit_to_tolerance([](double l) { return std::exp(-l); }, 1e-8, 12.0);
  CHECK(approx.certified_sup_error <= 1e-8);
  // and the certificate is honest on a fresh grid
  double observed = 0.0;
  for (int i = 0; i <= 9999; ++i) {
    double lam = 12.0 * i / 9999.0;
    observed = std::max(observed, std::abs(approx.evaluate(lam) - std::exp(-lam)));
  }
  CHECK(observed <= approx.certified_sup_error);
}
