#include "hyperweno/grid.hpp"

#include <cmath>
#include <string>

#include "hyperweno/error.hpp"

namespace hyperweno {

std::string_view to_string(BoundaryCondition bc) noexcept {
  return bc == BoundaryCondition::Periodic ? "periodic" : "noflux";
}

BoundaryCondition parse_boundary_condition(std::string_view name) {
  if (name == "periodic") return BoundaryCondition::Periodic;
  if (name == "noflux" || name == "no-flux") return BoundaryCondition::NoFlux;
  throw InvalidArgument("unknown boundary condition: " + std::string(name));
}

Grid make_grid(double x_lo, double x_hi, std::size_t n_cells) {
  if (!(x_hi > x_lo) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    throw InvalidArgument("make_grid: domain must satisfy x_lo < x_hi");
  }
  if (n_cells < kMinCells) {
    throw InvalidArgument("make_grid: need at least " + std::to_string(kMinCells) + " cells, got " +
                          std::to_string(n_cells));
  }
  Grid g;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.n_cells = n_cells;
  g.dx = (x_hi - x_lo) / static_cast<double>(n_cells);
  g.x_mid.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    g.x_mid[i] = x_lo + (static_cast<double>(i) + 0.5) * g.dx;
  }
  return g;
}

Field::Field(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw ShapeError("Field: data size does not match rows*cols");
}

std::vector<double> Field::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

std::size_t ghost_source(std::ptrdiff_t i, std::size_t n, BoundaryCondition bc) noexcept {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  if (i >= 0 && i < sn) return static_cast<std::size_t>(i);
  if (bc == BoundaryCondition::Periodic) {
    std::ptrdiff_t m = i % sn;
    if (m < 0) m += sn;
    return static_cast<std::size_t>(m);
  }
  return i < 0 ? 0 : n - 1;
}

Field pad_ghost(const Field& u, BoundaryCondition bc, std::size_t width) {
  const std::size_t n = u.rows();
  if (width < 1 || width > n) throw InvalidArgument("pad_ghost: need 1 <= width <= N");
  const std::size_t c = u.cols();
  Field out(n + 2 * width, c);
  const auto w = static_cast<std::ptrdiff_t>(width);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const std::size_t src = ghost_source(static_cast<std::ptrdiff_t>(r) - w, n, bc);
    for (std::size_t k = 0; k < c; ++k) out(r, k) = u(src, k);
  }
  return out;
}

double total(const Field& u, std::size_t component, double dx) {
  // Neumaier summation keeps the diagnostic below the scheme's own round-off.
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const double v = u(r, component) * dx;
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace hyperweno
