#pragma once

#include <cstddef>

#include "hyperweno/grid.hpp"

namespace hyperweno::ad {

enum class Padding { Circular, Replicate };

inline Padding padding_for(BoundaryCondition bc) noexcept {
  return bc == BoundaryCondition::Periodic ? Padding::Circular : Padding::Replicate;
}

struct ConvShape {
  std::size_t length = 0;  // L, output length equals input length
  std::size_t kernel = 1;  // K, odd; padding width (K - 1) / 2
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  bool local = false;  // per-position kernels (L x K x Cin x Cout) and biases (L x Cout)

  std::size_t kernel_block() const noexcept { return kernel * in_channels * out_channels; }
};

// Raw kernels over row-major buffers: x is L x Cin, w is K x Cin x Cout
// (or L x K x Cin x Cout when local), b is Cout (or L x Cout), y is L x Cout.
void conv1d_forward(const double* x, const double* w, const double* b, const ConvShape& s, Padding pad, double* y);

// Accumulates (+=) into gx, gw, gb; any of them may be null.
void conv1d_backward(const double* x, const double* w, const double* gy, const ConvShape& s, Padding pad,
                     double* gx, double* gw, double* gb);

}  // namespace hyperweno::ad
