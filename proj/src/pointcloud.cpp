#include "mfcn/pointcloud.hpp"

#include <cmath>

#include "mfcn/io.hpp"
#include "mfcn/rng.hpp"

namespace mfcn {

PointCloud::PointCloud(Eigen::MatrixXd points, int intrinsic_dim, std::string provenance)
    : points_(std::move(points)),
      intrinsic_dim_(intrinsic_dim),
      provenance_(std::move(provenance)) {
  if (points_.rows() < 1) throw ArgumentError("point cloud needs n >= 1 points");
  if (intrinsic_dim_ < 1 || intrinsic_dim_ > points_.cols())
    throw ArgumentError("intrinsic dimension must satisfy 1 <= d <= D (d=" +
                        std::to_string(intrinsic_dim_) +
                        ", D=" + std::to_string(points_.cols()) + ")");
  if (!points_.allFinite()) throw ArgumentError("point cloud contains non-finite entries");
}

void SignalMatrix::validate(int expected_n) const {
  if (n() != expected_n)
    throw DimensionError("signal has " + std::to_string(n()) + " rows, cloud has " +
                         std::to_string(expected_n) + " points");
  if (!values.allFinite()) throw EvaluationError("signal matrix contains non-finite entries");
}

PointCloud sample_sphere(int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample_sphere needs n >= 1");
  Rng rng(derive_seed(seed, {hash_tag("sphere-sampler")}));
  Eigen::MatrixXd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    double x, y, z, norm;
    do {
      x = rng.normal();
      y = rng.normal();
      z = rng.normal();
      norm = std::sqrt(x * x + y * y + z * z);
    } while (norm < 1e-12);
    pts(i, 0) = x / norm;
    pts(i, 1) = y / norm;
    pts(i, 2) = z / norm;
  }
  return PointCloud(std::move(pts), 2, "unit_sphere_uniform(seed=" + std::to_string(seed) + ")");
}

Eigen::VectorXd project_signal(const std::function<double(const Eigen::VectorXd&)>& f,
                               const PointCloud& cloud) {
  const int n = cloud.n();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    double v = f(cloud.points().row(i).transpose());
    if (!std::isfinite(v))
      throw EvaluationError("signal evaluated non-finite at sample index " + std::to_string(i));
    out(i) = v * scale;
  }
  return out;
}

Eigen::VectorXd project_samples(const Eigen::VectorXd& raw_values) {
  if (raw_values.size() == 0) throw ArgumentError("cannot project an empty sample vector");
  return raw_values / std::sqrt(static_cast<double>(raw_values.size()));
}

PointCloud load_points(const std::string& path, int intrinsic_dim) {
  CsvTable table = read_csv(path, /*allow_header=*/false);
  return PointCloud(std::move(table.values), intrinsic_dim, "file:" + path);
}

void save_points(const PointCloud& cloud, const std::string& path) {
  write_csv(cloud.points(), path);
}

SignalMatrix load_signals(const std::string& path) {
  CsvTable table = read_csv(path, /*allow_header=*/true);
  SignalMatrix s;
  s.values = std::move(table.values);
  if (!table.header.empty()) {
    s.channel_names = table.header;
  } else {
    for (int c = 0; c < s.channels(); ++c) s.channel_names.push_back("c" + std::to_string(c));
  }
  if (static_cast<int>(s.channel_names.size()) != s.channels())
    throw ParseError(path + ": header width does not match data width");
  s.normalized = false;
  return s;
}

void save_signals(const SignalMatrix& signals, const std::string& path, bool write_header) {
  write_csv(signals.values, path, write_header ? signals.channel_names : std::vector<std::string>{});
}

}  // namespace mfcn
