#include "hyperweno/simd/kernels.hpp"

#include "../weno_formulas.hpp"

namespace hyperweno::simd::scalar {

void axpy(double* y, double a, const double* x, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void weno5_classical(const double* p, std::size_t n_interfaces, const Weno5Params& params,
                     double* u_minus, double* u_plus) noexcept {
  using namespace hyperweno::detail;
  for (std::size_t j = 0; j < n_interfaces; ++j) {
    const double* s = p + j;
    double q[3], beta[3], w[3];

    candidates_minus(s[0], s[1], s[2], s[3], s[4], q);
    smoothness_minus(s[0], s[1], s[2], s[3], s[4], beta);
    weights_r2(beta, params.d_minus, params.epsilon, w);
    u_minus[j] = combine(w, q);

    candidates_plus(s[1], s[2], s[3], s[4], s[5], q);
    smoothness_plus(s[1], s[2], s[3], s[4], s[5], beta);
    weights_r2(beta, params.d_plus, params.epsilon, w);
    u_plus[j] = combine(w, q);
  }
}

}  // namespace hyperweno::simd::scalar
