#include "hyperweno/autodiff/optim.hpp"

#include <cmath>

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

void adam_step(ParameterStore& params, const Gradients& grads, OptimizerState& state) {
  const AdamConfig& c = state.config;
  // Validate everything before touching any parameter.
  for (const auto& [name, g] : grads) {
    if (params.at(name).numel() != g.size()) {
      throw ShapeError("adam_step: gradient for " + name + " has " + std::to_string(g.size()) + " entries, expected " +
                       std::to_string(params.at(name).numel()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (const auto& [name, g] : grads) {
    auto& p = params.at(name).data;
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.empty()) m.assign(g.size(), 0.0);
    if (v.empty()) v.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

}  // namespace hyperweno::ad
