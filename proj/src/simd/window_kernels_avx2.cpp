// AVX2 kernels: four paths per __m256d lane group. Compiled for the baseline
// target; only the functions below carry target("avx2"), and FMA is
// deliberately not enabled so results match the scalar kernels bit for bit.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "sigcpd/simd/window_kernels.hpp"

#define SIGCPD_AVX2 __attribute__((target("avx2")))

namespace sigcpd::simd::detail {
namespace {

inline std::size_t level_offset(int k) { return (std::size_t{1} << k) - 2; }
constexpr std::size_t kLanes = 4;

}  // namespace

SIGCPD_AVX2 std::size_t signatures_avx2(const SignatureArgs& args, std::size_t begin, std::size_t end,
                                        double* workspace) {
  const int depth = args.depth;
  const std::size_t n = args.n_paths;
  const std::size_t n_coef = level_offset(depth + 1);
  // Lane-interleaved: coefficient c of lane l lives at [c * 4 + l].
  double* sig = workspace;
  double* seg = workspace + n_coef * kLanes;

  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    const __m256d zero = _mm256_setzero_pd();
    for (std::size_t c = 0; c < n_coef; ++c) _mm256_storeu_pd(sig + c * kLanes, zero);

    for (std::size_t s = 0; s < args.n_segments; ++s) {
      const __m256d a = _mm256_loadu_pd(args.dt + s * n + p);
      const __m256d b = _mm256_loadu_pd(args.dy + s * n + p);

      _mm256_storeu_pd(seg, a);
      _mm256_storeu_pd(seg + kLanes, b);
      for (int k = 2; k <= depth; ++k) {
        const double* prev = seg + level_offset(k - 1) * kLanes;
        double* cur = seg + level_offset(k) * kLanes;
        const __m256d inv = _mm256_set1_pd(1.0 / k);
        const std::size_t prev_size = std::size_t{1} << (k - 1);
        for (std::size_t i = 0; i < prev_size; ++i) {
          const __m256d l = _mm256_mul_pd(_mm256_loadu_pd(prev + i * kLanes), inv);
          _mm256_storeu_pd(cur + (2 * i) * kLanes, _mm256_mul_pd(l, a));
          _mm256_storeu_pd(cur + (2 * i + 1) * kLanes, _mm256_mul_pd(l, b));
        }
      }

      for (int k = depth; k >= 1; --k) {
        double* sk = sig + level_offset(k) * kLanes;
        const double* ek = seg + level_offset(k) * kLanes;
        const std::size_t size = std::size_t{1} << k;
        for (std::size_t m = 0; m < size; ++m) {
          const __m256d v = _mm256_add_pd(_mm256_loadu_pd(sk + m * kLanes), _mm256_loadu_pd(ek + m * kLanes));
          _mm256_storeu_pd(sk + m * kLanes, v);
        }
        for (int i = 1; i < k; ++i) {
          const double* si = sig + level_offset(i) * kLanes;
          const double* ej = seg + level_offset(k - i) * kLanes;
          const std::size_t size_i = std::size_t{1} << i;
          const std::size_t size_j = std::size_t{1} << (k - i);
          std::size_t pos = 0;
          for (std::size_t u = 0; u < size_i; ++u) {
            const __m256d l = _mm256_loadu_pd(si + u * kLanes);
            for (std::size_t v = 0; v < size_j; ++v, ++pos) {
              const __m256d prod = _mm256_mul_pd(l, _mm256_loadu_pd(ej + v * kLanes));
              _mm256_storeu_pd(sk + pos * kLanes, _mm256_add_pd(_mm256_loadu_pd(sk + pos * kLanes), prod));
            }
          }
        }
      }
    }

    for (std::size_t c = 0; c < n_coef; ++c) _mm256_storeu_pd(args.out + c * n + p, _mm256_loadu_pd(sig + c * kLanes));
  }
  return p;
}

SIGCPD_AVX2 std::size_t distances_avx2(const DistanceArgs& args, std::size_t begin, std::size_t end) {
  const std::size_t n = args.n_paths;
  std::size_t p = begin;
  for (; p + kLanes <= end; p += kLanes) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t c = 0; c < args.n_coef; ++c) {
      const __m256d lhs = _mm256_loadu_pd(args.features + c * n + p);
      const __m256d rhs = _mm256_loadu_pd(args.features + c * n + p + args.lag);
      const __m256d diff = _mm256_sub_pd(lhs, rhs);
      sum = _mm256_add_pd(sum, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(args.out + p, _mm256_sqrt_pd(sum));
  }
  return p;
}

}  // namespace sigcpd::simd::detail

#endif
