#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfcn/errors.hpp"

namespace mfcn {

/// n sample points in ambient dimension D, assumed to lie on a manifold of
/// declared intrinsic dimension d. Immutable after construction.
class PointCloud {
 public:
  PointCloud(Eigen::MatrixXd points, int intrinsic_dim, std::string provenance);

  int n() const { return static_cast<int>(points_.rows()); }
  int ambient_dim() const { return static_cast<int>(points_.cols()); }
  int intrinsic_dim() const { return intrinsic_dim_; }
  const Eigen::MatrixXd& points() const { return points_; }
  const std::string& provenance() const { return provenance_; }

 private:
  Eigen::MatrixXd points_;  // n x D, one row per sample
  int intrinsic_dim_;
  std::string provenance_;
};

/// n x C matrix of discretized channels. `normalized` records whether the
/// 1/sqrt(n) projection scaling has been applied, so it is never applied
/// twice and error metrics can insist on projected inputs.
struct SignalMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> channel_names;
  bool normalized = false;

  int n() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
  void validate(int expected_n) const;
};

/// Draws n i.i.d. uniform points on the unit 2-sphere in R^3 (d = 2, D = 3).
/// Three independent Gaussians per point, normalized; deterministic per seed.
PointCloud sample_sphere(int n, std::uint64_t seed);

/// Sampling map (P_n f)(i) = f(x_i)/sqrt(n). Throws EvaluationError naming
/// the first sample index at which f is non-finite.
Eigen::VectorXd project_signal(const std::function<double(const Eigen::VectorXd&)>& f,
                               const PointCloud& cloud);

/// Applies the 1/sqrt(n) scaling to raw per-point samples.
Eigen::VectorXd project_samples(const Eigen::VectorXd& raw_values);

/// Reads a headerless CSV of decimal floats, one point per row.
PointCloud load_points(const std::string& path, int intrinsic_dim);

/// Writes the point CSV format read by load_points.
void save_points(const PointCloud& cloud, const std::string& path);

/// Reads a signal CSV: optional header row of channel names, then n x C
/// values. Channels are raw samples; normalized is false.
SignalMatrix load_signals(const std::string& path);

void save_signals(const SignalMatrix& signals, const std::string& path,
                  bool write_header = true);

}  // namespace mfcn
