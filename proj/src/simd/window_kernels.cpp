#include "sigcpd/simd/window_kernels.hpp"

#include <string>
#include <vector>

#include "sigcpd/error.hpp"
#include "sigcpd/tensor_seq.hpp"

namespace sigcpd::simd {

void batch_signatures(const IncrementBatch& batch, int depth, std::span<double> out, Isa isa) {
  if (depth < 1) throw InvalidInput("signature depth must be >= 1");
  // Levels are addressed with 64-bit shifts; 2^(depth+1) must stay sane.
  if (depth > 20) throw InvalidInput("signature depth " + std::to_string(depth) + " is too large");
  const std::size_t n_coef = feature_length(2, depth);
  const std::size_t n_inc = batch.n_paths * batch.n_segments;
  if (batch.dt.size() != n_inc || batch.dy.size() != n_inc)
    throw ShapeError("increment buffers do not match n_paths * n_segments");
  if (out.size() != n_coef * batch.n_paths) throw ShapeError("output buffer does not match feature_length * n_paths");
  if (batch.n_paths == 0) return;

  const detail::SignatureArgs args{batch.dt.data(), batch.dy.data(), out.data(), batch.n_paths, batch.n_segments,
                                   depth};
  // Two coefficient blocks (running signature, segment exponential) per lane.
  std::vector<double> workspace(2 * n_coef * 4);
  std::size_t done = 0;
  if (!isa_available(isa)) isa = Isa::scalar;
  switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
    case Isa::avx2: done = detail::signatures_avx2(args, 0, batch.n_paths, workspace.data()); break;
#endif
#if defined(__aarch64__)
    case Isa::neon: done = detail::signatures_neon(args, 0, batch.n_paths, workspace.data()); break;
#endif
    default: break;
  }
  detail::signatures_scalar(args, done, batch.n_paths, workspace.data());
}

void batch_signatures(const IncrementBatch& batch, int depth, std::span<double> out) {
  batch_signatures(batch, depth, out, active_isa());
}

void lagged_distances(std::span<const double> features, std::size_t n_paths, std::size_t n_coef, std::size_t lag,
                      std::span<double> out, Isa isa) {
  if (features.size() != n_paths * n_coef) throw ShapeError("feature matrix does not match n_paths * n_coef");
  if (lag > n_paths) throw ShapeError("lag exceeds number of paths");
  const std::size_t n_out = n_paths - lag;
  if (out.size() != n_out) throw ShapeError("distance buffer must hold n_paths - lag values");
  if (n_out == 0) return;

  const detail::DistanceArgs args{features.data(), out.data(), n_paths, n_coef, lag};
  std::size_t done = 0;
  if (!isa_available(isa)) isa = Isa::scalar;
  switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
    case Isa::avx2: done = detail::distances_avx2(args, 0, n_out); break;
#endif
#if defined(__aarch64__)
    case Isa::neon: done = detail::distances_neon(args, 0, n_out); break;
#endif
    default: break;
  }
  detail::distances_scalar(args, done, n_out);
}

void lagged_distances(std::span<const double> features, std::size_t n_paths, std::size_t n_coef, std::size_t lag,
                      std::span<double> out) {
  lagged_distances(features, n_paths, n_coef, lag, out, active_isa());
}

}  // namespace sigcpd::simd
