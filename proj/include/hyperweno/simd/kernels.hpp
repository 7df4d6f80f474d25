#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// `scalar::` and, on x86-64 builds, an AVX2 variant in `avx2::`. The
// unqualified entry points dispatch on simd::active_isa().
//
// The AVX2 variants never use FMA and never reassociate across lanes, except
// `dot`, whose horizontal reduction order differs from the scalar loop.
// Everything else is bitwise identical to the scalar reference.

#include <cstddef>

namespace hyperweno::simd {

// Classical WENO5 reconstruction (Jiang-Shu indicators, r = 2) along one
// component strip. `padded` holds n_interfaces + 5 values; interface j has
// its left cell at padded[j + 2]. d_minus/d_plus are the linear weights in
// candidate order.
struct Weno5Params {
  double d_minus[3];
  double d_plus[3];
  double epsilon;
};

namespace scalar {
void axpy(double* y, double a, const double* x, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
void weno5_classical(const double* padded, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept;
}  // namespace scalar

#if defined(HYPERWENO_HAVE_AVX2)
namespace avx2 {
void axpy(double* y, double a, const double* x, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
void weno5_classical(const double* padded, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept;
}  // namespace avx2
#endif

// y += a * x
void axpy(double* y, double a, const double* x, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
void weno5_classical(const double* padded, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept;

}  // namespace hyperweno::simd
