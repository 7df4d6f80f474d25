#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hyperweno/error.hpp"
#include "hyperweno/simd/isa.hpp"
#include "hyperweno/simd/kernels.hpp"

namespace hyperweno::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(HYPERWENO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const char* env = std::getenv("HYPERWENO_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return detected_isa();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

bool isa_supported(Isa isa) noexcept { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument(std::string("instruction set not supported: ") + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

void axpy(double* y, double a, const double* x, std::size_t n) noexcept {
#if defined(HYPERWENO_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::axpy(y, a, x, n);
#endif
  scalar::axpy(y, a, x, n);
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
#if defined(HYPERWENO_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::dot(a, b, n);
#endif
  return scalar::dot(a, b, n);
}

void weno5_classical(const double* padded, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept {
#if defined(HYPERWENO_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::weno5_classical(padded, n_interfaces, params, u_minus, u_plus);
#endif
  scalar::weno5_classical(padded, n_interfaces, params, u_minus, u_plus);
}

}  // namespace hyperweno::simd
