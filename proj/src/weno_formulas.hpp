#pragma once

// Per-interface WENO5 formulas shared by the scalar kernel and the
// standalone weno operations. Expression order here is the reference that
// the AVX2 kernel mirrors lane by lane; do not reorder terms.

namespace hyperweno::detail {

inline constexpr double kThirteenTwelfths = 13.0 / 12.0;

// Left-biased candidates at x_{i+1/2} from (u_{i-2}, ..., u_{i+2}).
inline void candidates_minus(double a, double b, double c, double d, double e, double q[3]) noexcept {
  q[0] = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
  q[1] = (-b + 5.0 * c + 2.0 * d) / 6.0;
  q[2] = (2.0 * c + 5.0 * d - e) / 6.0;
}

// Right-biased candidates at x_{i+1/2} from (u_{i-1}, ..., u_{i+3}).
inline void candidates_plus(double b, double c, double d, double e, double f, double q[3]) noexcept {
  q[0] = (11.0 * d - 7.0 * e + 2.0 * f) / 6.0;
  q[1] = (2.0 * c + 5.0 * d - e) / 6.0;
  q[2] = (-b + 5.0 * c + 2.0 * d) / 6.0;
}

inline double sq(double x) noexcept { return x * x; }

inline void smoothness_minus(double a, double b, double c, double d, double e, double beta[3]) noexcept {
  beta[0] = kThirteenTwelfths * sq(a - 2.0 * b + c) + 0.25 * sq(a - 4.0 * b + 3.0 * c);
  beta[1] = kThirteenTwelfths * sq(b - 2.0 * c + d) + 0.25 * sq(b - d);
  beta[2] = kThirteenTwelfths * sq(c - 2.0 * d + e) + 0.25 * sq(3.0 * c - 4.0 * d + e);
}

inline void smoothness_plus(double b, double c, double d, double e, double f, double beta[3]) noexcept {
  beta[0] = kThirteenTwelfths * sq(d - 2.0 * e + f) + 0.25 * sq(3.0 * d - 4.0 * e + f);
  beta[1] = kThirteenTwelfths * sq(c - 2.0 * d + e) + 0.25 * sq(c - e);
  beta[2] = kThirteenTwelfths * sq(b - 2.0 * c + d) + 0.25 * sq(b - 4.0 * c + 3.0 * d);
}

// r = 2 specialization: alpha_k = d_k / (eps + beta_k)^2, normalized.
inline void weights_r2(const double beta[3], const double d[3], double eps, double w[3]) noexcept {
  const double t0 = eps + beta[0];
  const double t1 = eps + beta[1];
  const double t2 = eps + beta[2];
  const double a0 = d[0] / (t0 * t0);
  const double a1 = d[1] / (t1 * t1);
  const double a2 = d[2] / (t2 * t2);
  const double s = a0 + a1 + a2;
  w[0] = a0 / s;
  w[1] = a1 / s;
  w[2] = a2 / s;
}

inline double combine(const double w[3], const double q[3]) noexcept {
  return w[0] * q[0] + w[1] * q[1] + w[2] * q[2];
}

}  // namespace hyperweno::detail
