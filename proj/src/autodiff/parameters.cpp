#include "hyperweno/autodiff/parameters.hpp"

#include <cmath>

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

void ParameterStore::set(const std::string& name, Tensor value) { entries_[name] = std::move(value); }

Tensor& ParameterStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw InvalidArgument("parameter not found: " + name);
  return it->second;
}

const Tensor& ParameterStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw InvalidArgument("parameter not found: " + name);
  return it->second;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::vector<std::string> ParameterStore::names_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
  return out;
}

std::size_t ParameterStore::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& [k, v] : entries_) n += v.numel();
  return n;
}

std::vector<double> ParameterStore::flatten(const std::vector<std::string>& names) const {
  std::vector<double> flat;
  for (const auto& n : names) {
    const auto& d = at(n).data;
    flat.insert(flat.end(), d.begin(), d.end());
  }
  return flat;
}

void ParameterStore::unflatten(const std::vector<std::string>& names, const std::vector<double>& flat) {
  std::size_t off = 0;
  for (const auto& n : names) {
    auto& d = at(n).data;
    if (off + d.size() > flat.size()) throw ShapeError("unflatten: vector too short");
    std::copy(flat.begin() + static_cast<long>(off), flat.begin() + static_cast<long>(off + d.size()), d.begin());
    off += d.size();
  }
  if (off != flat.size()) throw ShapeError("unflatten: vector too long");
}

bool operator==(const ParameterStore& a, const ParameterStore& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (auto ia = a.entries_.begin(), ib = b.entries_.begin(); ia != a.entries_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !(ia->second.shape == ib->second.shape) || ia->second.data != ib->second.data) {
      return false;
    }
  }
  return true;
}

BoundParameters::BoundParameters(Tape& tape, const ParameterStore& store, const std::vector<std::string>& names,
                                 bool requires_grad)
    : tape_(&tape) {
  for (const auto& n : names) vars_.emplace(n, tape.leaf(store.at(n), requires_grad));
}

Var BoundParameters::operator[](const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw InvalidArgument("parameter not bound: " + name);
  return it->second;
}

void BoundParameters::accumulate_grads(Gradients& out) const {
  for (const auto& [name, v] : vars_) {
    if (!v.requires_grad()) continue;
    std::vector<double> g = tape_->grad(v);
    auto& acc = out[name];
    if (acc.empty()) acc.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
  }
}

void add_into(Gradients& acc, const Gradients& g, double scale) {
  for (const auto& [name, vals] : g) {
    auto& a = acc[name];
    if (a.empty()) a.assign(vals.size(), 0.0);
    if (a.size() != vals.size()) throw ShapeError("gradient size mismatch for " + name);
    for (std::size_t i = 0; i < vals.size(); ++i) a[i] += scale * vals[i];
  }
}

double global_norm(const Gradients& g) {
  double s = 0.0;
  for (const auto& [name, vals] : g)
    for (double v : vals) s += v * v;
  return std::sqrt(s);
}

double clip_global_norm(Gradients& g, double max_norm) {
  const double norm = global_norm(g);
  if (norm > max_norm && norm > 0.0) {
    const double f = max_norm / norm;
    for (auto& [name, vals] : g)
      for (double& v : vals) v *= f;
  }
  return norm;
}

}  // namespace hyperweno::ad
