#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hyperweno/grid.hpp"

namespace hyperweno::weno {

// Ghost width needed to reconstruct both sides of the two boundary
// interfaces: u^+ at x_{N+1/2} reads u_{N+3}.
inline constexpr std::size_t kGhostWidth = 3;

// Optimal linear weights in candidate order (q_0, q_1, q_2). The right-biased
// set mirrors the stencils, which leaves the numbers in the same order.
inline constexpr std::array<double, 3> kLinearWeightsMinus{0.1, 0.6, 0.3};
inline constexpr std::array<double, 3> kLinearWeightsPlus{0.1, 0.6, 0.3};

struct WenoConfig {
  double epsilon = 1e-6;
  double power = 2.0;
  std::array<double, 3> d_minus = kLinearWeightsMinus;
  std::array<double, 3> d_plus = kLinearWeightsPlus;
};

// Per-interface triples, flat layout [(j * n_components + c) * 3 + k].
struct StencilTriples {
  std::size_t n_interfaces = 0;
  std::size_t n_components = 0;
  std::vector<double> minus;
  std::vector<double> plus;

  const double* minus_at(std::size_t j, std::size_t c) const noexcept { return &minus[(j * n_components + c) * 3]; }
  const double* plus_at(std::size_t j, std::size_t c) const noexcept { return &plus[(j * n_components + c) * 3]; }
};

using CandidateValues = StencilTriples;
using SmoothnessIndicators = StencilTriples;

enum class WeightSource { Classical, Learned, Linear };

// Convex weights per interface. n_components == 1 means one weight triple is
// shared by every component.
struct WenoWeights {
  StencilTriples rows;
  WeightSource source = WeightSource::Classical;

  const double* minus_at(std::size_t j, std::size_t c) const noexcept {
    return rows.minus_at(j, rows.n_components == 1 ? 0 : c);
  }
  const double* plus_at(std::size_t j, std::size_t c) const noexcept {
    return rows.plus_at(j, rows.n_components == 1 ? 0 : c);
  }
};

// u^- and u^+ at each interface, n_interfaces x n_components.
struct InterfaceStates {
  Field minus;
  Field plus;
};

// `padded` has R rows; the result covers R - 5 interfaces, the first of which
// has its left cell at padded row 2. With kGhostWidth ghosts that is N + 1
// interfaces, x_{1/2} .. x_{N+1/2}.
CandidateValues candidates(const Field& padded);
SmoothnessIndicators smoothness_indicators(const Field& padded);

// omega_k = (d_k / (eps + beta_k)^r) / sum_j (d_j / (eps + beta_j)^r)
void classical_weight_row(const double beta[3], const std::array<double, 3>& d, double epsilon, double power,
                          double out[3]);
WenoWeights classical_weights(const SmoothnessIndicators& beta, const WenoConfig& config);

// Linear weights d_k at every interface.
WenoWeights linear_weights(std::size_t n_interfaces, const WenoConfig& config);

InterfaceStates reconstruct(const CandidateValues& candidates, const WenoWeights& weights);

// Fused candidates + indicators + weights + combination. Dispatches to the
// SIMD kernel when power == 2; bitwise equal to the composed operations.
InterfaceStates reconstruct_classical(const Field& padded, const WenoConfig& config);

}  // namespace hyperweno::weno
