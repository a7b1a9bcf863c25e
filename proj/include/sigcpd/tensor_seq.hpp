#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sigcpd {

/// Element of the truncated tensor algebra T^(D)(R^d).
///
/// Level 0 is a scalar; level k (1 <= k <= D) holds d^k coefficients indexed
/// lexicographically by words (i_1, ..., i_k) with letters in [0, d). Levels
/// 1..D are stored contiguously so the flattened feature vector is a view.
class TensorSeq {
 public:
  TensorSeq(int dim, int depth, double level0 = 0.0);

  /// Multiplicative identity: level0 = 1, every other coefficient 0.
  static TensorSeq identity(int dim, int depth);

  int dim() const noexcept { return dim_; }
  int depth() const noexcept { return depth_; }

  double level0() const noexcept { return level0_; }
  void set_level0(double value) noexcept { level0_ = value; }

  /// Coefficients of level k, 1 <= k <= depth.
  std::span<const double> level(int k) const;
  std::span<double> level(int k);

  /// Levels 1..depth concatenated in level order.
  std::span<const double> coefficients() const noexcept { return data_; }
  std::span<double> coefficients() noexcept { return data_; }

  /// Coefficient addressed by a word of 0-based letters; an empty word is level 0.
  double at(std::initializer_list<int> word) const;
  double& at(std::initializer_list<int> word);

  bool all_finite() const noexcept;

  friend bool operator==(const TensorSeq&, const TensorSeq&) = default;

 private:
  std::size_t offset(int k) const noexcept;
  std::size_t word_index(std::initializer_list<int> word) const;

  int dim_;
  int depth_;
  double level0_;
  std::vector<double> data_;
};

/// (d^(D+1) - d) / (d - 1) for d > 1, D for d == 1.
std::size_t feature_length(int dim, int depth);

/// d^k as an exact integer.
std::size_t level_size(int dim, int k);

}  // namespace sigcpd
