#include "hyperweno/autodiff/tape.hpp"

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

const Tensor& Var::value() const { return tape->value(id); }
bool Var::requires_grad() const { return tape->requires_grad(id); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), {}, requires_grad && grad_enabled_, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, bool requires_grad, Backward fn) {
  const bool rg = requires_grad && grad_enabled_;
  nodes_.push_back(Node{std::move(value), {}, rg, rg ? std::move(fn) : Backward{}});
  return {this, nodes_.size() - 1};
}

void Tape::set_backward(std::size_t id, Backward fn) {
  Node& n = nodes_.at(id);
  if (n.requires_grad) n.backward = std::move(fn);
}

std::vector<double>& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.numel(), 0.0);
  return n.grad;
}

std::vector<double> Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.empty()) return std::vector<double>(n.value.numel(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw InvalidArgument("backward: loss belongs to another tape");
  if (nodes_[loss.id].value.numel() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " + nodes_[loss.id].value.shape.str());
  }
  for (Node& n : nodes_) n.grad.clear();
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace hyperweno::ad
