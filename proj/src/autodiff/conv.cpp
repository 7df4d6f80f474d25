#include "hyperweno/autodiff/conv.hpp"

#include <algorithm>

#include "hyperweno/error.hpp"
#include "hyperweno/simd/kernels.hpp"

namespace hyperweno::ad {

namespace {

BoundaryCondition as_bc(Padding p) noexcept {
  return p == Padding::Circular ? BoundaryCondition::Periodic : BoundaryCondition::NoFlux;
}

void validate(const ConvShape& s) {
  if (s.kernel % 2 == 0) throw InvalidArgument("conv1d: kernel size must be odd, got " + std::to_string(s.kernel));
  if (s.length == 0) throw ShapeError("conv1d: empty input");
}

}  // namespace

void conv1d_forward(const double* x, const double* w, const double* b, const ConvShape& s, Padding pad, double* y) {
  validate(s);
  const auto half = static_cast<std::ptrdiff_t>(s.kernel / 2);
  const BoundaryCondition bc = as_bc(pad);
  const std::size_t block = s.kernel_block();
  for (std::size_t i = 0; i < s.length; ++i) {
    double* yi = y + i * s.out_channels;
    const double* bi = s.local ? b + i * s.out_channels : b;
    std::copy(bi, bi + s.out_channels, yi);
    const double* wi = s.local ? w + i * block : w;
    for (std::size_t k = 0; k < s.kernel; ++k) {
      const std::size_t src =
          ghost_source(static_cast<std::ptrdiff_t>(i + k) - half, s.length, bc);
      const double* xs = x + src * s.in_channels;
      const double* wk = wi + k * s.in_channels * s.out_channels;
      for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
        simd::axpy(yi, xs[ci], wk + ci * s.out_channels, s.out_channels);
      }
    }
  }
}

void conv1d_backward(const double* x, const double* w, const double* gy, const ConvShape& s, Padding pad,
                     double* gx, double* gw, double* gb) {
  validate(s);
  const auto half = static_cast<std::ptrdiff_t>(s.kernel / 2);
  const BoundaryCondition bc = as_bc(pad);
  const std::size_t block = s.kernel_block();
  for (std::size_t i = 0; i < s.length; ++i) {
    const double* gyi = gy + i * s.out_channels;
    if (gb != nullptr) {
      simd::axpy(s.local ? gb + i * s.out_channels : gb, 1.0, gyi, s.out_channels);
    }
    const double* wi = s.local ? w + i * block : w;
    double* gwi = gw == nullptr ? nullptr : (s.local ? gw + i * block : gw);
    for (std::size_t k = 0; k < s.kernel; ++k) {
      const std::size_t src =
          ghost_source(static_cast<std::ptrdiff_t>(i + k) - half, s.length, bc);
      const double* xs = x + src * s.in_channels;
      const std::size_t koff = k * s.in_channels * s.out_channels;
      for (std::size_t ci = 0; ci < s.in_channels; ++ci) {
        const std::size_t off = koff + ci * s.out_channels;
        if (gx != nullptr) gx[src * s.in_channels + ci] += simd::dot(wi + off, gyi, s.out_channels);
        if (gwi != nullptr) simd::axpy(gwi + off, xs[ci], gyi, s.out_channels);
      }
    }
  }
}

}  // namespace hyperweno::ad
