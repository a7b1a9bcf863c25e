#include "sigcpd/simd/isa.hpp"

#include <atomic>
#include <cstdlib>

namespace sigcpd::simd {
namespace {

// -1: no override, otherwise the Isa value.
std::atomic<int> g_override{-1};

std::optional<Isa> env_override() noexcept {
  static const std::optional<Isa> cached = [] {
    const char* value = std::getenv("SIGCPD_ISA");
    return value ? parse_isa(value) : std::nullopt;
  }();
  return cached;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() noexcept {
  std::optional<Isa> chosen;
  if (const int o = g_override.load(std::memory_order_relaxed); o >= 0)
    chosen = static_cast<Isa>(o);
  else
    chosen = env_override();
  if (chosen) return isa_available(*chosen) ? *chosen : Isa::scalar;
  return best_isa();
}

void set_isa_override(std::optional<Isa> isa) noexcept {
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

}  // namespace sigcpd::simd
