#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hyperweno {

enum class BoundaryCondition { Periodic, NoFlux };

std::string_view to_string(BoundaryCondition bc) noexcept;
BoundaryCondition parse_boundary_condition(std::string_view name);

// WENO5 stencil plus interior; smaller meshes are rejected.
inline constexpr std::size_t kMinCells = 8;

// Uniform mesh on [x_lo, x_hi]. Cells are 0-based internally; interface j
// (0 <= j <= N) sits at x_lo + j*dx and has cell j-1 on its left.
struct Grid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  std::vector<double> x_mid;

  double interface_x(std::size_t j) const noexcept { return x_lo + static_cast<double>(j) * dx; }
};

Grid make_grid(double x_lo, double x_hi, std::size_t n_cells);

// Dense row-major rows x cols array of doubles. Rows are cells (or
// interfaces), columns are conserved components (or channels).
class Field {
 public:
  Field() = default;
  Field(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Field(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  // Copies column c into a contiguous vector.
  std::vector<double> column(std::size_t c) const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Cell averages (N x n_components) at time t.
struct State {
  Field u;
  double t = 0.0;

  std::size_t n_cells() const noexcept { return u.rows(); }
  std::size_t n_components() const noexcept { return u.cols(); }
};

// Maps a possibly out-of-range index i in [-width, n + width) onto the
// interior index supplying its value. Shared by ghost padding and by the
// circular/replicate convolution padding.
std::size_t ghost_source(std::ptrdiff_t i, std::size_t n, BoundaryCondition bc) noexcept;

// (N + 2*width) x C array: interior rows copied unchanged at [width, width+N),
// ghosts filled per bc. Requires 1 <= width <= N.
Field pad_ghost(const Field& u, BoundaryCondition bc, std::size_t width);

// Sum over cells of u(:, component) * dx, using compensated summation.
double total(const Field& u, std::size_t component, double dx);

}  // namespace hyperweno
