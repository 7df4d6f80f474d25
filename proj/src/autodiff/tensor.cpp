#include "hyperweno/autodiff/tensor.hpp"

#include <sstream>

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

Shape::Shape(std::initializer_list<std::size_t> dims) {
  if (dims.size() > kMaxRank) throw ShapeError("Shape: rank above " + std::to_string(kMaxRank));
  for (std::size_t d : dims) dims_[rank_++] = d;
}

Shape Shape::of(const std::vector<std::size_t>& dims) {
  if (dims.size() > kMaxRank) throw ShapeError("Shape: rank above " + std::to_string(kMaxRank));
  Shape s;
  for (std::size_t d : dims) s.dims_[s.rank_++] = d;
  return s;
}

std::size_t Shape::numel() const noexcept {
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank_; ++i) n *= dims_[i];
  return n;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < rank_; ++i) os << (i ? ", " : "") << dims_[i];
  os << ")";
  return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(s), data(std::move(values)) {
  if (data.size() != shape.numel()) {
    throw ShapeError("Tensor: " + std::to_string(data.size()) + " values for shape " + shape.str());
  }
}

double Tensor::item() const {
  if (data.size() != 1) throw ShapeError("Tensor::item on shape " + shape.str());
  return data[0];
}

}  // namespace hyperweno::ad
