#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>

#include "hyperweno/autodiff/parameters.hpp"
#include "hyperweno/networks.hpp"
#include "hyperweno/physics.hpp"
#include "hyperweno/stepper.hpp"

namespace hyperweno::scheme {

// Classical: Jiang-Shu WENO5 weights. Linear: fixed d_k. HyperCfcnn: learned
// weights, analytical Rusanov flux. HyperCfcnnF: learned weights and FluxNet.
enum class SchemeKind { Classical, Linear, HyperCfcnn, HyperCfcnnF };

std::string_view to_string(SchemeKind kind) noexcept;
SchemeKind parse_scheme_kind(std::string_view name);

// Everything needed to rebuild a scheme: kind, physics, WENO constants,
// architectures, and (for learned kinds) the trainable parameters.
struct Model {
  SchemeKind kind = SchemeKind::Classical;
  physics::SystemSpec system;
  weno::WenoConfig weno;
  networks::HyperNetConfig hyper;
  networks::FluxNetConfig flux;
  ad::ParameterStore params;

  bool learned_weights() const noexcept { return kind == SchemeKind::HyperCfcnn || kind == SchemeKind::HyperCfcnnF; }
  bool learned_flux() const noexcept { return kind == SchemeKind::HyperCfcnnF; }
  std::vector<std::string> trainable_names() const;
};

// FluxNet defaults per system: pointwise kernels for Euler.
networks::FluxNetConfig default_fluxnet_config(const physics::SystemSpec& sys);

// Fills component counts from the system and initializes parameters.
Model make_model(SchemeKind kind, const physics::SystemSpec& sys, std::uint64_t seed,
                 networks::HyperNetConfig hyper = {}, std::optional<networks::FluxNetConfig> flux = std::nullopt,
                 weno::WenoConfig weno = {});

// Checkpoints carry the parameters plus "meta.*" entries describing the model.
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);
ad::ParameterStore model_to_store(const Model& model);
Model model_from_store(ad::ParameterStore store);

// Learned weights from per-cell target parameters generated once per rollout.
class LearnedWeights final : public physics::WeightsProvider {
 public:
  explicit LearnedWeights(networks::TargetNetParams params) : params_(std::move(params)) {}
  weno::WenoWeights weights(const physics::RhsContext& ctx) const override;
  const networks::TargetNetParams& params() const noexcept { return params_; }

 private:
  networks::TargetNetParams params_;
};

class FluxNetFlux final : public physics::FluxProvider {
 public:
  FluxNetFlux(networks::FluxNetConfig cfg, const ad::ParameterStore& params) : cfg_(cfg), params_(&params) {}
  void fluxes(const weno::InterfaceStates& states, BoundaryCondition bc, Field& out) const override;

 private:
  networks::FluxNetConfig cfg_;
  const ad::ParameterStore* params_;
};

// A model bound to one grid, bc and rollout-initial state. Construction runs
// the hypernetwork (learned kinds); every later rhs() call reuses its output.
// Holds a reference to the model, which must outlive it.
class Instance {
 public:
  Instance(const Model& model, const Grid& grid, BoundaryCondition bc, const Field& initial);

  physics::RhsResult rhs(const Field& u) const;
  stepper::RhsOperator op() const;

  const Grid& grid() const noexcept { return grid_; }
  BoundaryCondition bc() const noexcept { return bc_; }
  // Null for non-learned kinds.
  const networks::TargetNetParams* target() const noexcept;

 private:
  const Model* model_;
  Grid grid_;
  BoundaryCondition bc_;
  std::unique_ptr<physics::WeightsProvider> weights_;
  std::unique_ptr<physics::FluxProvider> flux_;
};

stepper::RolloutRecord run_rollout(const Model& model, const Grid& grid, BoundaryCondition bc, const State& initial,
                                   std::size_t n_steps, double dt);

}  // namespace hyperweno::scheme
