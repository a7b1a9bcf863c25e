// Scalar reference kernels. The vector variants replay exactly this operation
// sequence one lane per path.

#include <cmath>

#include "sigcpd/simd/window_kernels.hpp"

namespace sigcpd::simd::detail {
namespace {

// Offset of level k inside a flattened planar signature: 2 + 4 + ... + 2^(k-1).
inline std::size_t level_offset(int k) { return (std::size_t{1} << k) - 2; }

}  // namespace

void signatures_scalar(const SignatureArgs& args, std::size_t begin, std::size_t end, double* workspace) {
  const int depth = args.depth;
  const std::size_t n = args.n_paths;
  const std::size_t n_coef = level_offset(depth + 1);
  double* sig = workspace;
  double* seg = workspace + n_coef;

  for (std::size_t p = begin; p < end; ++p) {
    for (std::size_t c = 0; c < n_coef; ++c) sig[c] = 0.0;

    for (std::size_t s = 0; s < args.n_segments; ++s) {
      const double a = args.dt[s * n + p];
      const double b = args.dy[s * n + p];

      // Segment exponential, level k = level(k-1) (x) (a, b) / k.
      seg[0] = a;
      seg[1] = b;
      for (int k = 2; k <= depth; ++k) {
        const double* prev = seg + level_offset(k - 1);
        double* cur = seg + level_offset(k);
        const double inv = 1.0 / k;
        const std::size_t prev_size = std::size_t{1} << (k - 1);
        for (std::size_t i = 0; i < prev_size; ++i) {
          const double l = prev[i] * inv;
          cur[2 * i] = l * a;
          cur[2 * i + 1] = l * b;
        }
      }

      // Chen update from the top level down so lower levels are still old.
      for (int k = depth; k >= 1; --k) {
        double* sk = sig + level_offset(k);
        const double* ek = seg + level_offset(k);
        const std::size_t size = std::size_t{1} << k;
        for (std::size_t m = 0; m < size; ++m) sk[m] = sk[m] + ek[m];
        for (int i = 1; i < k; ++i) {
          const double* si = sig + level_offset(i);
          const double* ej = seg + level_offset(k - i);
          const std::size_t size_i = std::size_t{1} << i;
          const std::size_t size_j = std::size_t{1} << (k - i);
          std::size_t pos = 0;
          for (std::size_t u = 0; u < size_i; ++u) {
            const double l = si[u];
            for (std::size_t v = 0; v < size_j; ++v) sk[pos++] += l * ej[v];
          }
        }
      }
    }

    for (std::size_t c = 0; c < n_coef; ++c) args.out[c * n + p] = sig[c];
  }
}

void distances_scalar(const DistanceArgs& args, std::size_t begin, std::size_t end) {
  const std::size_t n = args.n_paths;
  for (std::size_t p = begin; p < end; ++p) {
    double sum = 0.0;
    for (std::size_t c = 0; c < args.n_coef; ++c) {
      const double diff = args.features[c * n + p] - args.features[c * n + p + args.lag];
      sum = sum + diff * diff;
    }
    args.out[p] = std::sqrt(sum);
  }
}

}  // namespace sigcpd::simd::detail
