// Compiled with -mavx2 (and without -mfma). Only intrinsics and plain loops
// live here so no inline library code gets emitted with AVX encodings.

#include "hyperweno/simd/kernels.hpp"

#include <immintrin.h>

namespace hyperweno::simd::avx2 {

namespace {

inline __m256d set(double x) { return _mm256_set1_pd(x); }
inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d sub(__m256d a, __m256d b) { return _mm256_sub_pd(a, b); }
inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }
inline __m256d div(__m256d a, __m256d b) { return _mm256_div_pd(a, b); }
inline __m256d neg(__m256d a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
inline __m256d sq(__m256d a) { return _mm256_mul_pd(a, a); }

struct Lanes {
  __m256d two, three, four, five, six, seven, eleven, quarter, c1312, eps;
};

inline __m256d weighted(const __m256d q[3], const __m256d beta[3], const double d[3], const Lanes& k) {
  const __m256d t0 = add(k.eps, beta[0]);
  const __m256d t1 = add(k.eps, beta[1]);
  const __m256d t2 = add(k.eps, beta[2]);
  const __m256d a0 = div(set(d[0]), mul(t0, t0));
  const __m256d a1 = div(set(d[1]), mul(t1, t1));
  const __m256d a2 = div(set(d[2]), mul(t2, t2));
  const __m256d s = add(add(a0, a1), a2);
  const __m256d w0 = div(a0, s);
  const __m256d w1 = div(a1, s);
  const __m256d w2 = div(a2, s);
  return add(add(mul(w0, q[0]), mul(w1, q[1])), mul(w2, q[2]));
}

}  // namespace

void axpy(double* y, double a, const double* x, std::size_t n) noexcept {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d xv = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  double result = _mm_cvtsd_f64(s);
  for (; i < n; ++i) result += a[i] * b[i];
  return result;
}

void weno5_classical(const double* p, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept {
  const Lanes k{set(2.0),  set(3.0),  set(4.0), set(5.0),         set(6.0),
                set(7.0),  set(11.0), set(0.25), set(13.0 / 12.0), set(params.epsilon)};
  std::size_t j = 0;
  for (; j + 4 <= n_interfaces; j += 4) {
    const __m256d a = _mm256_loadu_pd(p + j);
    const __m256d b = _mm256_loadu_pd(p + j + 1);
    const __m256d c = _mm256_loadu_pd(p + j + 2);
    const __m256d d = _mm256_loadu_pd(p + j + 3);
    const __m256d e = _mm256_loadu_pd(p + j + 4);
    const __m256d f = _mm256_loadu_pd(p + j + 5);

    __m256d q[3], beta[3];
    q[0] = div(add(sub(mul(k.two, a), mul(k.seven, b)), mul(k.eleven, c)), k.six);
    q[1] = div(add(add(neg(b), mul(k.five, c)), mul(k.two, d)), k.six);
    q[2] = div(sub(add(mul(k.two, c), mul(k.five, d)), e), k.six);
    beta[0] = add(mul(k.c1312, sq(add(sub(a, mul(k.two, b)), c))),
                  mul(k.quarter, sq(add(sub(a, mul(k.four, b)), mul(k.three, c)))));
    beta[1] = add(mul(k.c1312, sq(add(sub(b, mul(k.two, c)), d))), mul(k.quarter, sq(sub(b, d))));
    beta[2] = add(mul(k.c1312, sq(add(sub(c, mul(k.two, d)), e))),
                  mul(k.quarter, sq(add(sub(mul(k.three, c), mul(k.four, d)), e))));
    _mm256_storeu_pd(u_minus + j, weighted(q, beta, params.d_minus, k));

    q[0] = div(add(sub(mul(k.eleven, d), mul(k.seven, e)), mul(k.two, f)), k.six);
    q[1] = div(sub(add(mul(k.two, c), mul(k.five, d)), e), k.six);
    q[2] = div(add(add(neg(b), mul(k.five, c)), mul(k.two, d)), k.six);
    beta[0] = add(mul(k.c1312, sq(add(sub(d, mul(k.two, e)), f))),
                  mul(k.quarter, sq(add(sub(mul(k.three, d), mul(k.four, e)), f))));
    beta[1] = add(mul(k.c1312, sq(add(sub(c, mul(k.two, d)), e))), mul(k.quarter, sq(sub(c, e))));
    beta[2] = add(mul(k.c1312, sq(add(sub(b, mul(k.two, c)), d))),
                  mul(k.quarter, sq(add(sub(b, mul(k.four, c)), mul(k.three, d)))));
    _mm256_storeu_pd(u_plus + j, weighted(q, beta, params.d_plus, k));
  }
  if (j < n_interfaces) {
    scalar::weno5_classical(p + j, n_interfaces - j, params, u_minus + j, u_plus + j);
  }
}

}  // namespace hyperweno::simd::avx2
