#pragma once

#include <optional>
#include <string_view>

namespace sigcpd::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

/// Whether the running CPU (and this build) can execute kernels for `isa`.
bool isa_available(Isa isa) noexcept;

/// Widest instruction set available at run time.
Isa best_isa() noexcept;

/// Instruction set used by the dispatching entry points: the override if one
/// is set (programmatically or through SIGCPD_ISA), otherwise best_isa().
/// An unavailable override falls back to scalar.
Isa active_isa() noexcept;

void set_isa_override(std::optional<Isa> isa) noexcept;

}  // namespace sigcpd::simd
