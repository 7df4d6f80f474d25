#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace hyperweno::ad {

inline constexpr std::size_t kMaxRank = 3;

// Rank 0..3 shape. Rank 0 is a scalar with one element.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);
  static Shape of(const std::vector<std::size_t>& dims);

  std::size_t rank() const noexcept { return rank_; }
  std::size_t operator[](std::size_t i) const noexcept { return dims_[i]; }
  std::size_t numel() const noexcept;

  // Rank-2 view: first axis as rows, the remaining axes flattened as columns.
  std::size_t rows() const noexcept { return rank_ == 0 ? 1 : dims_[0]; }
  std::size_t cols() const noexcept { return rank_ == 0 ? 1 : numel() / dims_[0]; }

  std::vector<std::size_t> dims() const { return {dims_.begin(), dims_.begin() + static_cast<long>(rank_)}; }
  std::string str() const;

  friend bool operator==(const Shape& a, const Shape& b) noexcept {
    if (a.rank_ != b.rank_) return false;
    for (std::size_t i = 0; i < a.rank_; ++i)
      if (a.dims_[i] != b.dims_[i]) return false;
    return true;
  }

 private:
  std::array<std::size_t, kMaxRank> dims_{};
  std::size_t rank_ = 0;
};

// Dense row-major array of doubles.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() : data(1, 0.0) {}
  explicit Tensor(Shape s, double fill = 0.0) : shape(s), data(s.numel(), fill) {}
  Tensor(Shape s, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }

  std::size_t numel() const noexcept { return data.size(); }
  double item() const;
  double& at(std::size_t r, std::size_t c) noexcept { return data[r * shape.cols() + c]; }
  double at(std::size_t r, std::size_t c) const noexcept { return data[r * shape.cols() + c]; }
};

}  // namespace hyperweno::ad
