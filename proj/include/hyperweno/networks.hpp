#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hyperweno/autodiff/ops.hpp"
#include "hyperweno/autodiff/parameters.hpp"
#include "hyperweno/grid.hpp"
#include "hyperweno/weno.hpp"

namespace hyperweno::networks {

// Per-cell network emitting the six reconstruction logits: a locally
// parameterized conv (kernel 5, C -> H, tanh) then a pointwise conv (H -> 6).
struct TargetNetConfig {
  std::size_t n_components = 1;
  std::size_t hidden = 6;
  std::size_t kernel = 5;

  std::size_t w1_size() const noexcept { return kernel * n_components * hidden; }
  std::size_t w2_size() const noexcept { return hidden * 6; }
  // Slab row layout: [w1 (k, c_in, c_out) | b1 | w2 (c_in, c_out) | b2].
  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return w1_size(); }
  std::size_t w2_offset() const noexcept { return b1_offset() + hidden; }
  std::size_t b2_offset() const noexcept { return w2_offset() + w2_size(); }
  // H (5C + 1) + 6 (H + 1): 78 for scalar problems with H = 6.
  std::size_t p_cell() const noexcept { return b2_offset() + 6; }
};

struct HyperNetConfig {
  std::size_t layers = 6;
  std::size_t channels = 32;
  std::size_t kernel = 5;
  TargetNetConfig target;

  std::size_t in_channels() const noexcept { return 2 + target.n_components; }
  std::size_t out_channels() const noexcept { return target.p_cell(); }
  std::size_t layer_in(std::size_t l) const noexcept { return l == 0 ? in_channels() : channels; }
  std::size_t layer_out(std::size_t l) const noexcept { return l + 1 == layers ? out_channels() : channels; }
};

struct FluxNetConfig {
  std::size_t layers = 4;
  std::size_t channels = 32;
  std::size_t kernel = 5;  // 1 for the pointwise Euler variant
  std::size_t n_components = 1;

  std::size_t in_channels() const noexcept { return 2 * n_components; }
  std::size_t layer_in(std::size_t l) const noexcept { return l == 0 ? in_channels() : channels; }
  std::size_t layer_out(std::size_t l) const noexcept { return l + 1 == layers ? n_components : channels; }
};

void validate(const HyperNetConfig& cfg);
void validate(const FluxNetConfig& cfg);

// Parameter names: "<prefix>l<k>.w" (kernel x c_in x c_out) and "<prefix>l<k>.b".
std::string weight_name(const std::string& prefix, std::size_t layer);
std::string bias_name(const std::string& prefix, std::size_t layer);
inline const std::string kHyperPrefix = "hyper.";
inline const std::string kFluxPrefix = "flux.";

// Hidden layers: uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and
// biases. Final hypernetwork layer: zero weights; its bias is constant over
// cells, carrying seeded fan-in values for the target's first layer, zeros
// for the target's pointwise weights, and ln d_k for the logit biases, so
// softmax of the generated logits is d_k everywhere.
void init_hypernet(const HyperNetConfig& cfg, const weno::WenoConfig& weno, std::uint64_t seed,
                   ad::ParameterStore& out);
// Final FluxNet layer is zero weight, zero bias.
void init_fluxnet(const FluxNetConfig& cfg, std::uint64_t seed, ad::ParameterStore& out);

// N x (2 + C): dx, cell centers mapped affinely onto [-1, 1], initial state.
Field build_metadata(const Grid& grid, const Field& initial);

// Generated per-cell target parameters, split by layer for the fast path.
struct TargetNetParams {
  TargetNetConfig config;
  std::size_t n_cells = 0;
  std::vector<double> w1, b1, w2, b2;  // each n_cells x (per-cell size)

  std::size_t total() const noexcept { return n_cells * config.p_cell(); }
};

TargetNetParams split_slab(const TargetNetConfig& cfg, const Field& slab);

// Number of hypernetwork evaluations since process start (both paths).
std::size_t hypernet_evaluations() noexcept;

// Fast, tape-free forward passes.
Field hypernet_forward(const HyperNetConfig& cfg, const ad::ParameterStore& params, const Field& metadata,
                       BoundaryCondition bc);
Field targetnet_forward(const TargetNetParams& params, const Field& u, BoundaryCondition bc);
// `minus`/`plus` are (N + 1) x C interface states; returns (N + 1) x C fluxes.
Field fluxnet_forward(const FluxNetConfig& cfg, const ad::ParameterStore& params, const Field& minus,
                      const Field& plus, BoundaryCondition bc);

// Differentiable versions on a tape.
ad::Var hypernet_forward(const HyperNetConfig& cfg, const ad::BoundParameters& params, ad::Var metadata,
                         BoundaryCondition bc);
ad::Var targetnet_forward(const TargetNetConfig& cfg, ad::Var slab, ad::Var u, BoundaryCondition bc);
ad::Var fluxnet_forward(const FluxNetConfig& cfg, const ad::BoundParameters& params, ad::Var minus, ad::Var plus,
                        BoundaryCondition bc);

// Logit row used for interface j in [0, N]: interface j has cell j - 1 on its
// left; x_{1/2} reads the ghost row (cell N - 1 periodic, cell 0 no-flux).
std::size_t logit_row(std::size_t j, std::size_t n_cells, BoundaryCondition bc) noexcept;

// Softmax of the six logits per interface into shared convex weights.
weno::WenoWeights logits_to_weights(const Field& logits, BoundaryCondition bc);

// HWCK1: magic, u32 entry count, then per entry u32 name length, name,
// u32 rank, u64 dims, f64 data (little-endian).
std::string encode_checkpoint(const ad::ParameterStore& params);
ad::ParameterStore decode_checkpoint(std::string bytes);
void save_checkpoint(const std::filesystem::path& path, const ad::ParameterStore& params);
ad::ParameterStore load_checkpoint(const std::filesystem::path& path);

}  // namespace hyperweno::networks
