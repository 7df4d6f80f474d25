#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hyperweno/autodiff/tape.hpp"
#include "hyperweno/autodiff/tensor.hpp"

namespace hyperweno::ad {

// Named parameter arrays, iterated in name order so that flattening and
// checkpoints are deterministic.
class ParameterStore {
 public:
  void set(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  void erase(const std::string& name) { entries_.erase(name); }

  std::vector<std::string> names() const;
  std::size_t total_size() const noexcept;
  std::size_t size() const noexcept { return entries_.size(); }

  // Names starting with `prefix`, e.g. "hyper." or "flux.".
  std::vector<std::string> names_with_prefix(const std::string& prefix) const;

  // Concatenation in name order; inverse of unflatten.
  std::vector<double> flatten(const std::vector<std::string>& names) const;
  void unflatten(const std::vector<std::string>& names, const std::vector<double>& flat);

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ParameterStore& a, const ParameterStore& b);

 private:
  std::map<std::string, Tensor> entries_;
};

// Gradients keyed like the parameters they belong to.
using Gradients = std::map<std::string, std::vector<double>>;

// Tape leaves for a set of parameters; grads are read back after backward().
class BoundParameters {
 public:
  BoundParameters(Tape& tape, const ParameterStore& store, const std::vector<std::string>& names,
                  bool requires_grad = true);

  Var operator[](const std::string& name) const;
  bool contains(const std::string& name) const { return vars_.count(name) != 0; }

  // Adds this tape's gradients into `out` (entries created as needed).
  void accumulate_grads(Gradients& out) const;

 private:
  Tape* tape_;
  std::map<std::string, Var> vars_;
};

void add_into(Gradients& acc, const Gradients& g, double scale = 1.0);
double global_norm(const Gradients& g);
// Rescales so the global norm is at most max_norm; returns the norm before.
double clip_global_norm(Gradients& g, double max_norm);

}  // namespace hyperweno::ad
