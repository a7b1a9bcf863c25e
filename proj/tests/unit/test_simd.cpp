#include <catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "sigcpd/error.hpp"
#include "sigcpd/signature.hpp"
#include "sigcpd/simd/window_kernels.hpp"
#include "sigcpd/tensor_seq.hpp"

using namespace sigcpd;
using namespace sigcpd::simd;

namespace {

struct Batch {
  std::size_t n_paths, n_segments;
  std::vector<double> dt, dy;
  IncrementBatch view() const { return {n_paths, n_segments, dt, dy}; }
};

Batch random_batch(std::size_t n_paths, std::size_t n_segments, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Batch b{n_paths, n_segments, std::vector<double>(n_paths * n_segments), std::vector<double>(n_paths * n_segments)};
  for (auto& x : b.dt) x = std::abs(u(rng)) / static_cast<double>(n_segments);
  for (auto& x : b.dy) x = u(rng);
  return b;
}

bool bit_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("isa names round trip and scalar is always available", "[simd]") {
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) CHECK(parse_isa(isa_name(isa)) == isa);
  CHECK_FALSE(parse_isa("sse9").has_value());
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_available(best_isa()));
  set_isa_override(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  set_isa_override(std::nullopt);
}

TEST_CASE("vector kernels are bit-identical to the scalar kernel", "[simd][equivalence]") {
  const auto isas = available_isas();
  INFO("available: " << isas.size());
  for (std::size_t n_paths : {1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 101u}) {
    for (int depth = 1; depth <= 5; ++depth) {
      const Batch b = random_batch(n_paths, 9, 1000 * n_paths + static_cast<std::uint64_t>(depth));
      const std::size_t n_coef = feature_length(2, depth);
      std::vector<double> ref(n_coef * n_paths);
      batch_signatures(b.view(), depth, ref, Isa::scalar);
      for (Isa isa : isas) {
        std::vector<double> got(ref.size(), -1.0);
        batch_signatures(b.view(), depth, got, isa);
        INFO("isa " << isa_name(isa) << " paths " << n_paths << " depth " << depth);
        CHECK(bit_equal(ref, got));
      }
      for (std::size_t lag = 1; lag < n_paths; lag += 3) {
        std::vector<double> dref(n_paths - lag);
        lagged_distances(ref, n_paths, n_coef, lag, dref, Isa::scalar);
        for (Isa isa : isas) {
          std::vector<double> dgot(dref.size(), -1.0);
          lagged_distances(ref, n_paths, n_coef, lag, dgot, isa);
          INFO("isa " << isa_name(isa) << " lag " << lag);
          CHECK(bit_equal(dref, dgot));
        }
      }
    }
  }
}

TEST_CASE("batch kernel agrees with the tensor-algebra signature", "[simd]") {
  const std::size_t n_paths = 11, n_segments = 13;
  const Batch b = random_batch(n_paths, n_segments, 77);
  for (int depth : {1, 3, 4}) {
    const std::size_t n_coef = feature_length(2, depth);
    std::vector<double> feats(n_coef * n_paths);
    batch_signatures(b.view(), depth, feats);
    for (std::size_t p = 0; p < n_paths; ++p) {
      std::vector<double> verts{0.0, 0.0};
      for (std::size_t s = 0; s < n_segments; ++s) {
        verts.push_back(verts[verts.size() - 2] + b.dt[s * n_paths + p]);
        verts.push_back(verts[verts.size() - 2] + b.dy[s * n_paths + p]);
      }
      const auto ref = flatten(polyline_signature(verts, 2, depth));
      for (std::size_t c = 0; c < n_coef; ++c)
        CHECK(std::abs(feats[c * n_paths + p] - ref[c]) <= 1e-12 * std::max(1.0, std::abs(ref[c])));
    }
  }
}

TEST_CASE("lagged distances are Euclidean norms of column differences", "[simd]") {
  const std::size_t n_paths = 6, n_coef = 3;
  std::vector<double> f(n_coef * n_paths);
  for (std::size_t c = 0; c < n_coef; ++c)
    for (std::size_t p = 0; p < n_paths; ++p) f[c * n_paths + p] = static_cast<double>(p * (c + 1));
  std::vector<double> d(n_paths - 2);
  lagged_distances(f, n_paths, n_coef, 2, d);
  // Column p+2 minus column p is (2, 4, 6).
  for (double x : d) CHECK(x == Catch::Approx(std::sqrt(56.0)).epsilon(1e-15));
}

TEST_CASE("kernels reject mis-sized buffers", "[simd][errors]") {
  const Batch b = random_batch(4, 3, 1);
  std::vector<double> small(5);
  CHECK_THROWS_AS(batch_signatures(b.view(), 3, small), ShapeError);
  CHECK_THROWS_AS(batch_signatures(b.view(), 0, small), InvalidInput);
  std::vector<double> feats(14 * 4);
  std::vector<double> d(4);
  CHECK_THROWS_AS(lagged_distances(feats, 4, 14, 1, d), ShapeError);
  CHECK_THROWS_AS(lagged_distances(feats, 4, 14, 5, std::span<double>{}), ShapeError);
  CHECK_NOTHROW(lagged_distances(feats, 4, 14, 4, std::span<double>{}));
}
