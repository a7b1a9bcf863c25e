#pragma once

#include <span>
#include <vector>

#include "sigcpd/tensor_seq.hpp"

namespace sigcpd {

struct PathPoint {
  double t;
  double y;

  friend bool operator==(const PathPoint&, const PathPoint&) = default;
};

/// A polyline in the unit square with strictly increasing time coordinate.
class NormalizedPath {
 public:
  /// Throws InsufficientData for fewer than 2 points and InvalidInput when a
  /// coordinate leaves [0, 1] or t is not strictly increasing.
  explicit NormalizedPath(std::vector<PathPoint> points);

  std::span<const PathPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  friend bool operator==(const NormalizedPath&, const NormalizedPath&) = default;

 private:
  std::vector<PathPoint> points_;
};

/// Tensor exponential of a single linear increment: level k is delta^{(x)k} / k!.
TensorSeq segment_signature(std::span<const double> delta, int depth);

/// Truncated tensor-algebra product (Chen concatenation when both operands
/// are signatures).
TensorSeq chen_concat(const TensorSeq& a, const TensorSeq& b);

/// Truncated exponential series of an arbitrary element; requires level0 == 0.
TensorSeq tensor_exp(const TensorSeq& x);

/// Truncated logarithm of a group-like element; requires level0 == 1.
TensorSeq log_signature(const TensorSeq& sig);

/// Exact signature of a piecewise-linear path given as consecutive vertices
/// in R^dim (row-major, dim values per vertex).
TensorSeq polyline_signature(std::span<const double> vertices, int dim, int depth);

/// Exact signature of a normalized (t, y) path.
TensorSeq path_signature(const NormalizedPath& path, int depth);

/// Levels 1..D in level order then lexicographic order.
std::vector<double> flatten(const TensorSeq& sig);

/// Euclidean norm of flatten(a) - flatten(b).
double sig_distance(const TensorSeq& a, const TensorSeq& b);

}  // namespace sigcpd
