#include <cmath>

#include "doctest.h"
#include "mfcn/harness.hpp"
#include "mfcn/rng.hpp"
#include "mfcn/serialization.hpp"
#include "mfcn/sphere.hpp"
#include "oracles.hpp"

using namespace mfcn;
using namespace mfcn::sphere;

TEST_CASE("harmonic spot values in the probability-orthonormal convention") {
  CHECK(eval_harmonic(0, 0, {0.3, -0.4, std::sqrt(1 - 0.25)}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_harmonic(1, 0, {0, 0, 1}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(eval_harmonic(2, 0, {1, 0, 0}) == doctest::Approx(-std::sqrt(5.0) / 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(eval_harmonic(1, 2, {0, 0, 1}), ArgumentError);
  CHECK_THROWS_AS(eval_harmonic(1, 0, {0, 0, 2}), ArgumentError);
}

TEST_CASE("eval_harmonic matches the slow Legendre-series oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 40; ++rep) {
    Eigen::Vector3d p(rng.normal(), rng.normal(), rng.normal());
    p.normalize();
    for (int l = 0; l <= 6; ++l)
      for (int m = -l; m <= l; ++m) {
        const double fast = eval_harmonic(l, m, p);
        const double slow = oracles::slow_harmonic(l, m, p);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
      }
  }
}

TEST_CASE("monte-carlo gram matrix of harmonics up to degree 3 is near identity") {
  PointCloud cloud = sample_sphere(100000, 3);
  std::vector<std::pair<int, int>> lm;
  for (int l = 0; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) lm.emplace_back(l, m);
  const int F = static_cast<int>(lm.size());
  Eigen::MatrixXd Y(cloud.n(), F);
  for (int i = 0; i < cloud.n(); ++i) {
    Eigen::Vector3d p = cloud.points().row(i).transpose();
    for (int f = 0; f < F; ++f) Y(i, f) = eval_harmonic(lm[f].first, lm[f].second, p);
  }
  Eigen::MatrixXd gram = Y.transpose() * Y / cloud.n();
  Eigen::MatrixXd err = gram - Eigen::MatrixXd::Identity(F, F);
  CHECK(err.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("continuum eigenvalues per limit operator") {
  CHECK(continuum_eigenvalue(1, LimitKind::EpsLimit) ==
        doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-15));
  CHECK(continuum_eigenvalue(0, LimitKind::EpsLimit) == 0.0);
  CHECK(continuum_eigenvalue(0, LimitKind::KnnLimit) == 0.0);
  CHECK(continuum_eigenvalue(1, LimitKind::KnnLimit) == doctest::Approx(4.0 * M_PI).epsilon(1e-15));
  CHECK(continuum_eigenvalue(2, LimitKind::EpsLimit) ==
        doctest::Approx(6.0 / (8.0 * M_PI)).epsilon(1e-15));
  CHECK(continuum_eigenvalue(2, LimitKind::KnnLimit) == doctest::Approx(12.0 * M_PI).epsilon(1e-15));
  // strictly increasing in l
  for (auto kind : {LimitKind::EpsLimit, LimitKind::KnnLimit})
    for (int l = 0; l < 9; ++l)
      CHECK(continuum_eigenvalue(l + 1, kind) > continuum_eigenvalue(l, kind));
}

TEST_CASE("continuum_filter scales coefficients diagonally") {
  HarmonicExpansion f{{1, 0, 1.0}, {2, 0, 1.0}};

  // all-pass leaves f unchanged
  HarmonicExpansion same = continuum_filter(SpectralFilter::constant(1.0), f, LimitKind::EpsLimit);
  CHECK(same.coeff(1, 0) == 1.0);
  CHECK(same.coeff(2, 0) == 1.0);

  // heat filter: e^{-l(l+1)/(8 pi)}
  HarmonicExpansion heat = continuum_filter(SpectralFilter::heat(), f, LimitKind::EpsLimit);
  CHECK(heat.coeff(1, 0) == doctest::Approx(0.92350647172310852).epsilon(1e-14));
  CHECK(heat.coeff(2, 0) == doctest::Approx(0.78762561126188111).epsilon(1e-14));

  // wavelet on a single harmonic is the scalar band response
  HarmonicExpansion single{{2, 1, 3.0}};
  const double lam = continuum_eigenvalue(2, LimitKind::EpsLimit);
  HarmonicExpansion banded = continuum_filter(SpectralFilter::wavelet(2), single, LimitKind::EpsLimit);
  CHECK(banded.coeff(2, 1) ==
        doctest::Approx(3.0 * (std::exp(-2.0 * lam) - std::exp(-4.0 * lam))).epsilon(1e-14));

  // exact linearity
  HarmonicExpansion g{{1, 0, 0.5}, {3, -2, -2.0}};
  SpectralFilter w = SpectralFilter::heat();
  HarmonicExpansion combo = continuum_filter(w, f.plus(g, 2.0), LimitKind::KnnLimit);
  HarmonicExpansion parts =
      continuum_filter(w, f, LimitKind::KnnLimit).plus(continuum_filter(w, g, LimitKind::KnnLimit), 2.0);
  for (const auto& [key, c] : parts.terms())
    CHECK(combo.coeff(key.first, key.second) == doctest::Approx(c).epsilon(1e-15));
}

TEST_CASE("continuum_network_forward for linear networks") {
  HarmonicExpansion f{{1, 0, 1.0}, {2, 0, 1.0}};
  NetworkSpec one;
  one.layers = {LayerSpec::identity_collapsed({SpectralFilter::heat()}, 1, Activation::Identity)};

  auto out = continuum_network_forward(one, {f}, LimitKind::EpsLimit);
  REQUIRE(out.size() == 1);
  HarmonicExpansion direct = continuum_filter(SpectralFilter::heat(), f, LimitKind::EpsLimit);
  CHECK(out[0].coeff(1, 0) == doctest::Approx(direct.coeff(1, 0)).epsilon(1e-15));

  // two stacked heat layers scale by e^{-2 lambda}
  NetworkSpec two;
  two.layers.assign(2, one.layers[0]);
  auto out2 = continuum_network_forward(two, {f}, LimitKind::EpsLimit);
  const double lam1 = continuum_eigenvalue(1, LimitKind::EpsLimit);
  CHECK(out2[0].coeff(1, 0) == doctest::Approx(std::exp(-2.0 * lam1)).epsilon(1e-14));

  // zero expansion stays zero
  auto zero = continuum_network_forward(two, {HarmonicExpansion{}}, LimitKind::EpsLimit);
  CHECK(zero[0].empty());

  // nonlinear activations have no continuum oracle
  NetworkSpec relu;
  relu.layers = {LayerSpec::identity_collapsed({SpectralFilter::heat()}, 1, Activation::Relu)};
  CHECK_THROWS_AS(continuum_network_forward(relu, {f}, LimitKind::EpsLimit), NotSupportedError);
}

TEST_CASE("quadrature: weights normalize and L4 norms match closed forms") {
  SphereQuadrature quad = SphereQuadrature::product_rule(8, 16);
  double total = 0.0;
  for (double w : quad.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

  // ||Y_0^0||_4 = 1; ||Y_1^0||_4^4 = 9/5; ||Y_2^0||_4^4 = 15/7
  HarmonicExpansion y00{{0, 0, 1.0}};
  CHECK(y00.l4_norm() == doctest::Approx(1.0).epsilon(1e-13));
  HarmonicExpansion y10{{1, 0, 1.0}};
  CHECK(std::pow(y10.l4_norm(), 4.0) == doctest::Approx(9.0 / 5.0).epsilon(1e-12));
  HarmonicExpansion y20{{2, 0, 1.0}};
  CHECK(std::pow(y20.l4_norm(), 4.0) == doctest::Approx(15.0 / 7.0).epsilon(1e-12));
  // and the default signal: ||Y10 + Y20||_4^4 = 13.3714285...
  HarmonicExpansion f{{1, 0, 1.0}, {2, 0, 1.0}};
  CHECK(std::pow(f.l4_norm(), 4.0) == doctest::Approx(13.371428571428571).epsilon(1e-12));

  // l2 norms by orthonormality
  CHECK(f.l2_norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.inner(y10) == 1.0);
  CHECK(y10.inner(y20) == 0.0);
}

TEST_CASE("projected harmonics concentrate like the log(n)/n bound") {
  // <P_n Y, P_n Y'> vs kronecker delta at n = 8192, 50 seeds, >= 95% within
  // 6 sqrt(log n / n) ||Y||_4 ||Y'||_4.
  const int n = 8192;
  auto family = harmonic_family(2);
  std::vector<double> l4(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) l4[i] = family[i].l4_norm();
  const double factor = 6.0 * std::sqrt(std::log(static_cast<double>(n)) / n);

  int total = 0, within = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PointCloud cloud = sample_sphere(n, 1000 + seed);
    Eigen::MatrixXd P(n, static_cast<int>(family.size()));
    for (std::size_t f = 0; f < family.size(); ++f)
      P.col(static_cast<int>(f)) = project_expansion(family[f], cloud);
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = a; b < family.size(); ++b) {
        const double inner = P.col(static_cast<int>(a)).dot(P.col(static_cast<int>(b)));
        const double target = family[a].inner(family[b]);
        ++total;
        if (std::abs(inner - target) <= factor * l4[a] * l4[b]) ++within;
      }
  }
  CHECK(within >= static_cast<int>(0.95 * total));
}

TEST_CASE("expansion JSON round trips") {
  HarmonicExpansion f{{1, 0, 1.0}, {2, -1, -0.25}};
  json j = expansion_to_json(f);
  HarmonicExpansion back = expansion_from_json(j);
  CHECK(back.coeff(1, 0) == 1.0);
  CHECK(back.coeff(2, -1) == -0.25);
  CHECK(back.term_count() == 2);

  CHECK_THROWS_AS(expansion_from_json(json::parse("[{\"l\":1}]")), ConfigError);
}
