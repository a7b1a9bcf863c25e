#include "sigcpd/tensor_seq.hpp"

#include <cmath>
#include <string>

#include "sigcpd/error.hpp"

namespace sigcpd {

std::size_t level_size(int dim, int k) {
  std::size_t n = 1;
  for (int i = 0; i < k; ++i) n *= static_cast<std::size_t>(dim);
  return n;
}

std::size_t feature_length(int dim, int depth) {
  std::size_t total = 0;
  std::size_t n = 1;
  for (int k = 1; k <= depth; ++k) {
    n *= static_cast<std::size_t>(dim);
    total += n;
  }
  return total;
}

TensorSeq::TensorSeq(int dim, int depth, double level0) : dim_(dim), depth_(depth), level0_(level0) {
  if (dim < 1) throw InvalidInput("tensor dimension must be >= 1, got " + std::to_string(dim));
  if (depth < 1) throw InvalidInput("truncation depth must be >= 1, got " + std::to_string(depth));
  data_.assign(feature_length(dim, depth), 0.0);
}

TensorSeq TensorSeq::identity(int dim, int depth) { return TensorSeq(dim, depth, 1.0); }

std::size_t TensorSeq::offset(int k) const noexcept { return feature_length(dim_, k - 1); }

std::span<const double> TensorSeq::level(int k) const {
  if (k < 1 || k > depth_) throw InvalidInput("level " + std::to_string(k) + " outside 1.." + std::to_string(depth_));
  return std::span<const double>(data_).subspan(offset(k), level_size(dim_, k));
}

std::span<double> TensorSeq::level(int k) {
  if (k < 1 || k > depth_) throw InvalidInput("level " + std::to_string(k) + " outside 1.." + std::to_string(depth_));
  return std::span<double>(data_).subspan(offset(k), level_size(dim_, k));
}

std::size_t TensorSeq::word_index(std::initializer_list<int> word) const {
  const int k = static_cast<int>(word.size());
  if (k > depth_) throw InvalidInput("word longer than truncation depth");
  std::size_t index = 0;
  for (int letter : word) {
    if (letter < 0 || letter >= dim_) throw InvalidInput("letter " + std::to_string(letter) + " outside alphabet");
    index = index * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(letter);
  }
  return offset(k) + index;
}

double TensorSeq::at(std::initializer_list<int> word) const {
  if (word.size() == 0) return level0_;
  return data_[word_index(word)];
}

double& TensorSeq::at(std::initializer_list<int> word) {
  if (word.size() == 0) return level0_;
  return data_[word_index(word)];
}

bool TensorSeq::all_finite() const noexcept {
  if (!std::isfinite(level0_)) return false;
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace sigcpd
