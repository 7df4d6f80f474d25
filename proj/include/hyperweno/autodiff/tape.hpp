#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "hyperweno/autodiff/tensor.hpp"

namespace hyperweno::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until Tape::clear().
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape; }
  bool requires_grad() const;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so the node
// index is a topological order and backward() walks it once in reverse.
// A tape belongs to one thread at a time.
class Tape {
 public:
  // Receives the accumulated output gradient; adds into parents' grads.
  using Backward = std::function<void(Tape&, std::span<const double> out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Records an op output. When no parent requires grad, `fn` is dropped.
  Var record(Tensor value, bool requires_grad, Backward fn);

  // Attaches a backward rule after the fact (ops that need their own output id).
  // Ignored for nodes that do not require grad.
  void set_backward(std::size_t id, Backward fn);

  // Runs reverse accumulation from a scalar loss (seed 1).
  void backward(Var loss);

  // Releases every node; outstanding Vars become invalid.
  void clear();

  std::size_t size() const noexcept { return nodes_.size(); }

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient of a node after backward(); zeros when nothing flowed into it.
  std::vector<double> grad(Var v) const;

  // Accumulator for op backward rules (allocated on first use).
  std::vector<double>& grad_buffer(std::size_t id);

  // When disabled, every new node is a constant and no closures are kept.
  void set_grad_enabled(bool enabled) noexcept { grad_enabled_ = enabled; }
  bool grad_enabled() const noexcept { return grad_enabled_; }

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::deque<Node> nodes_;
  bool grad_enabled_ = true;
};

}  // namespace hyperweno::ad
