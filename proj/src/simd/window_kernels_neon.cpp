// NEON kernels: two paths per float64x2_t. Advanced SIMD is mandatory on
// AArch64 so no runtime probe is needed. Built with -ffp-contract=off so the
// compiler does not fuse the multiply-adds that the scalar kernel keeps apart.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "sigcpd/simd/window_kernels.hpp"

namespace sigcpd::simd::detail {
namespace {

inline std::size_t level_offset(int k) { return (std::size_t{1} << k) - 2; }
constexpr std::size_t kLanes = 2;

}  // namespace

std::size_t signatures_neon(const SignatureArgs& args, std::size_t begin, std::size_t end, double* workspace) {
  const int depth = args.depth;
  const std::size_t n = args.n_paths;
  const std::size_t n_coef = level_offset(depth + 1);
  double* sig = workspace;
  double* seg = workspace + n_coef * kLanes;

  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < n_coef; ++c) vst1q_f64(sig + c * kLanes, zero);

    for (std::size_t s = 0; s < args.n_segments; ++s) {
      const float64x2_t a = vld1q_f64(args.dt + s * n + p);
      const float64x2_t b = vld1q_f64(args.dy + s * n + p);

      vst1q_f64(seg, a);
      vst1q_f64(seg + kLanes, b);
      for (int k = 2; k <= depth; ++k) {
        const double* prev = seg + level_offset(k - 1) * kLanes;
        double* cur = seg + level_offset(k) * kLanes;
        const float64x2_t inv = vdupq_n_f64(1.0 / k);
        const std::size_t prev_size = std::size_t{1} << (k - 1);
        for (std::size_t i = 0; i < prev_size; ++i) {
          const float64x2_t l = vmulq_f64(vld1q_f64(prev + i * kLanes), inv);
          vst1q_f64(cur + (2 * i) * kLanes, vmulq_f64(l, a));
          vst1q_f64(cur + (2 * i + 1) * kLanes, vmulq_f64(l, b));
        }
      }

      for (int k = depth; k >= 1; --k) {
        double* sk = sig + level_offset(k) * kLanes;
        const double* ek = seg + level_offset(k) * kLanes;
        const std::size_t size = std::size_t{1} << k;
        for (std::size_t m = 0; m < size; ++m)
          vst1q_f64(sk + m * kLanes, vaddq_f64(vld1q_f64(sk + m * kLanes), vld1q_f64(ek + m * kLanes)));
        for (int i = 1; i < k; ++i) {
          const double* si = sig + level_offset(i) * kLanes;
          const double* ej = seg + level_offset(k - i) * kLanes;
          const std::size_t size_i = std::size_t{1} << i;
          const std::size_t size_j = std::size_t{1} << (k - i);
          std::size_t pos = 0;
          for (std::size_t u = 0; u < size_i; ++u) {
            const float64x2_t l = vld1q_f64(si + u * kLanes);
            for (std::size_t v = 0; v < size_j; ++v, ++pos) {
              // vmulq + vaddq, not vfmaq: keep rounding identical to scalar.
              const float64x2_t prod = vmulq_f64(l, vld1q_f64(ej + v * kLanes));
              vst1q_f64(sk + pos * kLanes, vaddq_f64(vld1q_f64(sk + pos * kLanes), prod));
            }
          }
        }
      }
    }

    for (std::size_t c = 0; c < n_coef; ++c) vst1q_f64(args.out + c * n + p, vld1q_f64(sig + c * kLanes));
  }
  return p;
}

std::size_t distances_neon(const DistanceArgs& args, std::size_t begin, std::size_t end) {
  const std::size_t n = args.n_paths;
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    float64x2_t sum = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < args.n_coef; ++c) {
      const float64x2_t diff =
          vsubq_f64(vld1q_f64(args.features + c * n + p), vld1q_f64(args.features + c * n + p + args.lag));
      sum = vaddq_f64(sum, vmulq_f64(diff, diff));
    }
    vst1q_f64(args.out + p, vsqrtq_f64(sum));
  }
  return p;
}

}  // namespace sigcpd::simd::detail

#endif
