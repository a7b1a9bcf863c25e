#include "sigcpd/signature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigcpd/error.hpp"

namespace sigcpd {
namespace {

void require_same_shape(const TensorSeq& a, const TensorSeq& b, const char* op) {
  if (a.dim() != b.dim() || a.depth() != b.depth()) {
    throw ShapeError(std::string(op) + ": shape mismatch (dim " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()) + ", depth " + std::to_string(a.depth()) + " vs " +
                     std::to_string(b.depth()) + ")");
  }
}

// out_k += scale * (lhs_i (x) rhs_j), i + j = k, both i, j >= 1.
void accumulate_outer(std::span<double> out, std::span<const double> lhs, std::span<const double> rhs, double scale) {
  std::size_t pos = 0;
  for (double l : lhs) {
    const double ls = l * scale;
    for (double r : rhs) out[pos++] += ls * r;
  }
}

TensorSeq multiply(const TensorSeq& a, const TensorSeq& b) {
  const int depth = a.depth();
  TensorSeq out(a.dim(), depth, a.level0() * b.level0());
  for (int k = 1; k <= depth; ++k) {
    auto dst = out.level(k);
    auto ak = a.level(k);
    auto bk = b.level(k);
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] = a.level0() * bk[n] + ak[n] * b.level0();
    for (int i = 1; i < k; ++i) accumulate_outer(dst, a.level(i), b.level(k - i), 1.0);
  }
  return out;
}

void add_scaled(TensorSeq& acc, const TensorSeq& x, double scale) {
  acc.set_level0(acc.level0() + scale * x.level0());
  auto dst = acc.coefficients();
  auto src = x.coefficients();
  for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += scale * src[n];
}

}  // namespace

NormalizedPath::NormalizedPath(std::vector<PathPoint> points) : points_(std::move(points)) {
  if (points_.size() < 2)
    throw InsufficientData("normalized path needs at least 2 points", 2, points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.t >= 0.0 && p.t <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
      throw InvalidInput("normalized path point " + std::to_string(i) + " outside the unit square");
    if (i > 0 && !(p.t > points_[i - 1].t))
      throw InvalidInput("normalized path time must be strictly increasing at point " + std::to_string(i));
  }
}

TensorSeq segment_signature(std::span<const double> delta, int depth) {
  const int dim = static_cast<int>(delta.size());
  for (double v : delta)
    if (!std::isfinite(v)) throw InvalidInput("segment increment must be finite");
  TensorSeq out = TensorSeq::identity(dim, depth);
  auto first = out.level(1);
  std::copy(delta.begin(), delta.end(), first.begin());
  for (int k = 2; k <= depth; ++k) {
    auto prev = out.level(k - 1);
    auto cur = out.level(k);
    accumulate_outer(cur, prev, delta, 1.0 / k);
  }
  return out;
}

TensorSeq chen_concat(const TensorSeq& a, const TensorSeq& b) {
  require_same_shape(a, b, "chen_concat");
  return multiply(a, b);
}

TensorSeq tensor_exp(const TensorSeq& x) {
  if (x.level0() != 0.0) throw InvalidInput("tensor_exp requires level0 == 0");
  TensorSeq sum = TensorSeq::identity(x.dim(), x.depth());
  TensorSeq power = TensorSeq::identity(x.dim(), x.depth());
  for (int n = 1; n <= x.depth(); ++n) {
    power = multiply(power, x);
    for (double& v : power.coefficients()) v /= n;
    add_scaled(sum, power, 1.0);
  }
  return sum;
}

TensorSeq log_signature(const TensorSeq& sig) {
  if (sig.level0() != 1.0)
    throw InvalidInput("log_signature requires a group-like element (level0 == 1), got " +
                       std::to_string(sig.level0()));
  TensorSeq x = sig;
  x.set_level0(0.0);
  TensorSeq sum(sig.dim(), sig.depth(), 0.0);
  TensorSeq power = TensorSeq::identity(sig.dim(), sig.depth());
  for (int n = 1; n <= sig.depth(); ++n) {
    power = multiply(power, x);
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    add_scaled(sum, power, sign / n);
  }
  sum.set_level0(0.0);
  return sum;
}

TensorSeq polyline_signature(std::span<const double> vertices, int dim, int depth) {
  if (dim < 1) throw InvalidInput("path dimension must be >= 1");
  if (vertices.size() % static_cast<std::size_t>(dim) != 0)
    throw InvalidInput("vertex buffer length is not a multiple of the dimension");
  const std::size_t n_points = vertices.size() / static_cast<std::size_t>(dim);
  if (n_points < 2) throw InsufficientData("path signature needs at least 2 points", 2, n_points);

  TensorSeq acc = TensorSeq::identity(dim, depth);
  std::vector<double> delta(static_cast<std::size_t>(dim));
  for (std::size_t p = 1; p < n_points; ++p) {
    for (int c = 0; c < dim; ++c)
      delta[c] = vertices[p * dim + c] - vertices[(p - 1) * dim + c];
    acc = multiply(acc, segment_signature(delta, depth));
  }
  return acc;
}

TensorSeq path_signature(const NormalizedPath& path, int depth) {
  std::vector<double> vertices;
  vertices.reserve(path.size() * 2);
  for (const auto& p : path.points()) {
    vertices.push_back(p.t);
    vertices.push_back(p.y);
  }
  return polyline_signature(vertices, 2, depth);
}

std::vector<double> flatten(const TensorSeq& sig) {
  auto c = sig.coefficients();
  return {c.begin(), c.end()};
}

double sig_distance(const TensorSeq& a, const TensorSeq& b) {
  require_same_shape(a, b, "sig_distance");
  auto x = a.coefficients();
  auto y = b.coefficients();
  double sum = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double diff = x[n] - y[n];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace sigcpd
