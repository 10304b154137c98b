#pragma once

#include <Eigen/Core>
#include <vector>

namespace mfcn {

/// Exact kd-tree over the rows of a point matrix. Splits on the widest
/// coordinate at the median; ties everywhere resolve by ascending row index
/// so queries reproduce the brute-force result bit for bit.
class KdTree {
 public:
  explicit KdTree(const Eigen::MatrixXd& points);

  /// Indices i != query with |x_i - x_q|^2 < radius^2 (strict), ascending.
  std::vector<int> radius_neighbors(int query, double radius) const;

  /// The k nearest indices to row `query` (excluding itself) ordered by
  /// (squared distance, index) ascending.
  std::vector<int> nearest_neighbors(int query, int k) const;

  double distance_sq(int i, int j) const {
    return (points_.row(i) - points_.row(j)).squaredNorm();
  }

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    double split = 0.0;  // split coordinate value
    int left = -1, right = -1;
    int begin = 0, end = 0;  // index range into order_ (leaves)
  };

  int build(int begin, int end);

  const Eigen::MatrixXd& points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
  static constexpr int kLeafSize = 16;
};

}  // namespace mfcn
