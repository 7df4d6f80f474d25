#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "hyperweno/grid.hpp"

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;

// Exact cell averages of sin(x) on a grid.
inline hyperweno::Field sine_averages(const hyperweno::Grid& g) {
  hyperweno::Field u(g.n_cells, 1);
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    const double a = g.interface_x(i), b = g.interface_x(i + 1);
    u(i, 0) = (std::cos(a) - std::cos(b)) / g.dx;
  }
  return u;
}

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline hyperweno::Field random_field(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                                     double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  hyperweno::Field f(rows, cols);
  for (double& v : f.values()) v = d(rng);
  return f;
}

}  // namespace testing_support
