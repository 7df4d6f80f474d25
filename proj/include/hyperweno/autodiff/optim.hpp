#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hyperweno/autodiff/parameters.hpp"

namespace hyperweno::ad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  AdamConfig config;
  std::size_t step = 0;
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
};

// One bias-corrected Adam update of every parameter that has a gradient.
// Parameters without an entry in `grads` are left alone (and keep their moments).
void adam_step(ParameterStore& params, const Gradients& grads, OptimizerState& state);

}  // namespace hyperweno::ad
