#pragma once

#include <cstddef>
#include <span>

#include "sigcpd/simd/isa.hpp"

namespace sigcpd::simd {

/// Increments of many planar polylines that all have the same number of
/// segments. Layout is segment-major so that consecutive paths are adjacent:
/// dt[s * n_paths + p] is the time increment of segment s of path p.
struct IncrementBatch {
  std::size_t n_paths = 0;
  std::size_t n_segments = 0;
  std::span<const double> dt;
  std::span<const double> dy;
};

/// Truncated signatures of every path in the batch, written coefficient-major:
/// out[c * n_paths + p] is flattened coefficient c of path p. Requires
/// out.size() == feature_length(2, depth) * n_paths.
///
/// All variants perform the same floating-point operations in the same order
/// (no contraction), so results are bit-identical across instruction sets.
void batch_signatures(const IncrementBatch& batch, int depth, std::span<double> out, Isa isa);
void batch_signatures(const IncrementBatch& batch, int depth, std::span<double> out);

/// out[p] = || F[:, p] - F[:, p + lag] ||_2 for p in [0, n_paths - lag), with F
/// the coefficient-major feature matrix produced by batch_signatures.
void lagged_distances(std::span<const double> features, std::size_t n_paths, std::size_t n_coef,
                      std::size_t lag, std::span<double> out, Isa isa);
void lagged_distances(std::span<const double> features, std::size_t n_paths, std::size_t n_coef,
                      std::size_t lag, std::span<double> out);

namespace detail {

// Per-ISA entry points over the half-open path range [begin, end). They take
// raw pointers so that no inline standard-library code is instantiated under
// a non-baseline target attribute.
struct SignatureArgs {
  const double* dt;
  const double* dy;
  double* out;
  std::size_t n_paths;
  std::size_t n_segments;
  int depth;
};

struct DistanceArgs {
  const double* features;
  double* out;
  std::size_t n_paths;
  std::size_t n_coef;
  std::size_t lag;
};

void signatures_scalar(const SignatureArgs& args, std::size_t begin, std::size_t end, double* workspace);
void distances_scalar(const DistanceArgs& args, std::size_t begin, std::size_t end);

#if defined(__x86_64__) || defined(__i386__)
// Processes whole 4-lane blocks starting at `begin`; returns the first
// unprocessed path index.
std::size_t signatures_avx2(const SignatureArgs& args, std::size_t begin, std::size_t end, double* workspace);
std::size_t distances_avx2(const DistanceArgs& args, std::size_t begin, std::size_t end);
#endif

#if defined(__aarch64__)
std::size_t signatures_neon(const SignatureArgs& args, std::size_t begin, std::size_t end, double* workspace);
std::size_t distances_neon(const DistanceArgs& args, std::size_t begin, std::size_t end);
#endif

}  // namespace detail
}  // namespace sigcpd::simd
