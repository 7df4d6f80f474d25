#pragma once

#include <string_view>

namespace hyperweno::simd {

enum class Isa { Scalar, Avx2 };

// Best instruction set supported by both this build and the running CPU.
Isa detected_isa() noexcept;

// Instruction set used by the dispatched kernels. Starts at detected_isa(),
// unless HYPERWENO_ISA=scalar is set in the environment.
Isa active_isa() noexcept;

// Throws InvalidArgument when `isa` is not supported here.
void set_active_isa(Isa isa);

bool isa_supported(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

// Restores the previous selection on scope exit. Used by equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace hyperweno::simd
