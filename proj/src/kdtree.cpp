#include "mfcn/kdtree.hpp"

#include <algorithm>
#include <queue>

#include "mfcn/errors.hpp"

namespace mfcn {

KdTree::KdTree(const Eigen::MatrixXd& points) : points_(points) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw ArgumentError("kd-tree needs at least one point");
  order_.resize(n);
  for (int i = 0; i < n; ++i) order_[i] = i;
  nodes_.reserve(2 * n / kLeafSize + 2);
  root_ = build(0, n);
}

int KdTree::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  const int count = end - begin;
  if (count <= kLeafSize) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Split on the widest coordinate over this range.
  const int dims = static_cast<int>(points_.cols());
  int axis = 0;
  double best_spread = -1.0;
  for (int d = 0; d < dims; ++d) {
    double lo = points_(order_[begin], d), hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      double v = points_(order_[i], d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = d;
    }
  }
  if (best_spread <= 0.0) {
    // All points in this range coincide; keep as one leaf.
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  const int mid = begin + count / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     double va = points_(a, axis), vb = points_(b, axis);
                     return va < vb || (va == vb && a < b);
                   });
  node.axis = axis;
  node.split = points_(order_[mid], axis);

  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  int left = build(begin, mid);
  int right = build(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

std::vector<int> KdTree::radius_neighbors(int query, double radius) const {
  const double r2 = radius * radius;
  std::vector<int> result;
  std::vector<int> stack{root_};
  const auto q = points_.row(query);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.axis < 0 || node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        if (idx == query) continue;
        if ((points_.row(idx) - q).squaredNorm() < r2) result.push_back(idx);
      }
      continue;
    }
    const double diff = q(node.axis) - node.split;
    // diff^2 >= r2 cannot exclude equality-boundary points on the near side,
    // so descend whenever the slab distance is not strictly larger.
    if (diff < 0) {
      stack.push_back(node.left);
      if (diff * diff < r2) stack.push_back(node.right);
    } else {
      stack.push_back(node.right);
      if (diff * diff < r2) stack.push_back(node.left);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

namespace {
struct HeapEntry {
  double d2;
  int idx;
  bool operator<(const HeapEntry& o) const {
    return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
  }
};
}  // namespace

std::vector<int> KdTree::nearest_neighbors(int query, int k) const {
  const int n = static_cast<int>(points_.rows());
  if (k < 1 || k > n - 1) throw ArgumentError("k must be in [1, n-1]");
  // Max-heap on (d2, idx); the top is the current worst candidate.
  std::priority_queue<HeapEntry> heap;
  const auto q = points_.row(query);

  // Iterative depth-first descent, nearer child first.
  struct Frame {
    int node;
    double slab_d2;  // squared axis distance to this subtree's slab
  };
  std::vector<Frame> stack{{root_, 0.0}};
  while (!stack.empty()) {
    Frame frame = stack.back();
    stack.pop_back();
    if (static_cast<int>(heap.size()) == k) {
      const HeapEntry worst = heap.top();
      // Prune only on strict >, so equal-distance smaller-index candidates
      // are still visited and tie order matches brute force.
      if (frame.slab_d2 > worst.d2) continue;
    }
    const Node& node = nodes_[frame.node];
    if (node.axis < 0 || node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        if (idx == query) continue;
        HeapEntry cand{(points_.row(idx) - q).squaredNorm(), idx};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      continue;
    }
    const double diff = q(node.axis) - node.split;
    const double far_d2 = diff * diff;
    if (diff < 0) {
      stack.push_back({node.right, std::max(frame.slab_d2, far_d2)});
      stack.push_back({node.left, frame.slab_d2});
    } else {
      stack.push_back({node.left, std::max(frame.slab_d2, far_d2)});
      stack.push_back({node.right, frame.slab_d2});
    }
  }

  std::vector<HeapEntry> entries;
  entries.reserve(heap.size());
  while (!heap.empty()) {
    entries.push_back(heap.top());
    heap.pop();
  }
  std::sort(entries.begin(), entries.end());
  std::vector<int> result(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) result[i] = entries[i].idx;
  return result;
}

}  // namespace mfcn
