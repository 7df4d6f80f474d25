#pragma once

#include <optional>

#include "hyperweno/autodiff/ops.hpp"
#include "hyperweno/autodiff/parameters.hpp"
#include "hyperweno/scheme.hpp"

namespace hyperweno::diff {

// The solver re-expressed on tape nodes: ghost padding, candidates,
// weights, Rusanov or FluxNet fluxes, the conservative difference and
// SSP-RK3. Values agree with scheme::Instance to round-off.
class Solver {
 public:
  // Generates the target parameters once from `metadata` for learned kinds.
  // `params` must bind every name in model.trainable_names().
  Solver(const scheme::Model& model, const ad::BoundParameters* params, const Grid& grid, BoundaryCondition bc,
         ad::Var metadata);

  struct Rhs {
    ad::Var dudt;   // N x C
    ad::Var f_hat;  // (N + 1) x C
  };
  Rhs rhs(ad::Var u) const;
  ad::Var step(ad::Var u, double dt) const;

  // Null Var (tape == nullptr) for non-learned kinds.
  ad::Var target_slab() const noexcept { return slab_; }

 private:
  ad::Var weights_minus_plus(ad::Var u, ad::Var padded, ad::Var& w_minus, ad::Var& w_plus) const;
  ad::Var rusanov(ad::Var um, ad::Var up) const;

  const scheme::Model* model_;
  const ad::BoundParameters* params_;
  Grid grid_;
  BoundaryCondition bc_;
  ad::Var slab_;
};

// Ghost padding on a tape node (gather with the grid's ghost rule).
ad::Var pad_ghost(ad::Var u, BoundaryCondition bc, std::size_t width);

}  // namespace hyperweno::diff
