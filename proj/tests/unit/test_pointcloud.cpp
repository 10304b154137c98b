#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "mfcn/io.hpp"
#include "mfcn/pointcloud.hpp"
#include "mfcn/rng.hpp"
#include "mfcn/sphere.hpp"

using namespace mfcn;

namespace {
std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/mfcn_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}
}  // namespace

TEST_CASE("sample_sphere puts points on the unit sphere") {
  PointCloud cloud = sample_sphere(1, 0);
  CHECK(cloud.n() == 1);
  CHECK(cloud.ambient_dim() == 3);
  CHECK(cloud.intrinsic_dim() == 2);
  CHECK(std::abs(cloud.points().row(0).norm() - 1.0) < 1e-12);

  PointCloud big = sample_sphere(500, 11);
  for (int i = 0; i < big.n(); ++i) CHECK(std::abs(big.points().row(i).norm() - 1.0) < 1e-12);
}

TEST_CASE("sample_sphere coordinate means satisfy the CLT bound at n = 10000") {
  // 3 sigma / sqrt(n) with per-coordinate sigma = 1/sqrt(3).
  const double bound = 3.0 * (1.0 / std::sqrt(3.0)) / std::sqrt(10000.0);
  PointCloud cloud = sample_sphere(10000, 7);
  Eigen::Vector3d mean = cloud.points().colwise().mean();
  for (int c = 0; c < 3; ++c) CHECK(std::abs(mean(c)) < bound);

  // Same bound across seeds; a ~99.7% event, so allow a few hits in 90.
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Eigen::Vector3d m = sample_sphere(10000, seed).points().colwise().mean();
    for (int c = 0; c < 3; ++c)
      if (std::abs(m(c)) >= bound) ++violations;
  }
  CHECK(violations <= 3);
}

TEST_CASE("sample_sphere is deterministic per seed") {
  PointCloud a = sample_sphere(5, 3);
  PointCloud b = sample_sphere(5, 3);
  CHECK(a.points() == b.points());  // bitwise
  PointCloud c = sample_sphere(5, 4);
  CHECK(a.points() != c.points());
}

TEST_CASE("sample_sphere empirical mean is rotation-unbiased at n = 1e5") {
  PointCloud cloud = sample_sphere(100000, 123);
  CHECK(cloud.points().colwise().mean().norm() < 0.02);
}

TEST_CASE("project_signal applies the 1/sqrt(n) scaling") {
  Eigen::MatrixXd pts(4, 3);
  pts << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0;
  PointCloud cloud(pts, 2, "test");
  Eigen::VectorXd p = project_signal([](const Eigen::VectorXd&) { return 1.0; }, cloud);
  for (int i = 0; i < 4; ++i) CHECK(p(i) == 0.5);  // 1/sqrt(4) is exact

  // ||P_n 1||_2 = 1 exactly for any n
  for (int n : {3, 17, 100}) {
    PointCloud c2 = sample_sphere(n, 1);
    Eigen::VectorXd q = project_signal([](const Eigen::VectorXd&) { return 1.0; }, c2);
    CHECK(std::abs(q.norm() - 1.0) < 1e-13);
  }
}

TEST_CASE("projected norm of Y10 + Y20 approaches sqrt(2)") {
  sphere::HarmonicExpansion f{{1, 0, 1.0}, {2, 0, 1.0}};
  PointCloud cloud = sample_sphere(4096, 5);
  Eigen::VectorXd p = sphere::project_expansion(f, cloud);
  CHECK(p.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(0.05 / std::sqrt(2.0)));
}

TEST_CASE("projected norm concentration matches the log(n)/n bound") {
  // |  ||P_n f||^2 - ||f||^2 | <= 6 sqrt(log n / n) ||f||_4^2, tested via the
  // median over 10 seeds at n = 8192.
  sphere::HarmonicExpansion f{{1, 0, 1.0}, {2, 0, 1.0}};
  const double l4 = f.l4_norm();
  const int n = 8192;
  const double bound = 6.0 * std::sqrt(std::log(static_cast<double>(n)) / n) * l4 * l4;
  std::vector<double> deviations;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd p = sphere::project_expansion(f, sample_sphere(n, seed));
    deviations.push_back(std::abs(p.squaredNorm() - 2.0));
  }
  std::sort(deviations.begin(), deviations.end());
  const double median = 0.5 * (deviations[4] + deviations[5]);
  CHECK(median <= bound);
}

TEST_CASE("project_signal names the index of a non-finite evaluation") {
  PointCloud cloud = sample_sphere(3, 2);
  int calls = 0;
  auto f = [&](const Eigen::VectorXd&) {
    return calls++ == 1 ? std::numeric_limits<double>::quiet_NaN() : 0.5;
  };
  CHECK_THROWS_WITH_AS(project_signal(f, cloud), doctest::Contains("index 1"), EvaluationError);
}

TEST_CASE("load_points reads a plain CSV") {
  std::string path = write_temp("pts.csv", "0,0,1\n0,1,0\n1,0,0\n");
  PointCloud cloud = load_points(path, 2);
  CHECK(cloud.n() == 3);
  CHECK(cloud.ambient_dim() == 3);
  CHECK(cloud.points()(0, 2) == 1.0);
  CHECK(cloud.provenance() == "file:" + path);
  std::remove(path.c_str());
}

TEST_CASE("load_points rejects degenerate input") {
  std::string empty = write_temp("empty.csv", "");
  CHECK_THROWS_AS(load_points(empty, 2), ParseError);
  std::remove(empty.c_str());

  std::string alpha = write_temp("alpha.csv", "a,b,c\n");
  CHECK_THROWS_WITH_AS(load_points(alpha, 2), doctest::Contains("line 1"), ParseError);
  std::remove(alpha.c_str());

  std::string ragged = write_temp("ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_WITH_AS(load_points(ragged, 2), doctest::Contains("line 2"), ParseError);
  std::remove(ragged.c_str());
}

TEST_CASE("point CSV round trips byte-identically") {
  PointCloud cloud = sample_sphere(17, 9);
  std::string p1 = "/tmp/mfcn_test_roundtrip1.csv";
  std::string p2 = "/tmp/mfcn_test_roundtrip2.csv";
  save_points(cloud, p1);
  PointCloud back = load_points(p1, 2);
  save_points(back, p2);
  CHECK(read_text_file(p1) == read_text_file(p2));
  CHECK(back.points() == cloud.points());  // %.17g round trip is exact
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("signal CSV header handling") {
  std::string with = write_temp("sig1.csv", "a,b\n1,2\n3,4\n");
  SignalMatrix s1 = load_signals(with);
  CHECK(s1.channel_names == std::vector<std::string>{"a", "b"});
  CHECK(s1.values(1, 1) == 4.0);
  CHECK_FALSE(s1.normalized);
  std::remove(with.c_str());

  std::string without = write_temp("sig2.csv", "1,2\n3,4\n");
  SignalMatrix s2 = load_signals(without);
  CHECK(s2.channel_names == std::vector<std::string>{"c0", "c1"});
  CHECK(s2.values.rows() == 2);
  std::remove(without.c_str());
}

TEST_CASE("invalid point clouds are rejected") {
  Eigen::MatrixXd pts(2, 3);
  pts.setZero();
  CHECK_THROWS_AS(PointCloud(pts, 0, "x"), ArgumentError);
  CHECK_THROWS_AS(PointCloud(pts, 4, "x"), ArgumentError);
  pts(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PointCloud(pts, 2, "x"), ArgumentError);
  CHECK_THROWS_AS(sample_sphere(0, 1), ArgumentError);
}
