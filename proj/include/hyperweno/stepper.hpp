#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hyperweno/grid.hpp"
#include "hyperweno/physics.hpp"

namespace hyperweno::stepper {

// Any |entry| above this (or a NaN) aborts the step with StepDiverged.
inline constexpr double kDivergenceThreshold = 1e8;

using RhsOperator = std::function<physics::RhsResult(const Field&)>;

struct StepResult {
  Field u;
  // 2 x C: row 0 is the effective flux at x_{1/2}, row 1 at x_{N+1/2}.
  Field boundary_flux;
};

// Three-stage SSP Runge-Kutta. The logged boundary flux is the stage
// combination F(u^n)/6 + F(u^(1))/6 + 2 F(u^(2))/3, i.e. the flux for which
// the step's net update telescopes.
StepResult ssp_rk3_step(const Field& u, double dt, const RhsOperator& rhs);

void check_divergence(const Field& u);

struct RolloutRecord {
  Grid grid;
  BoundaryCondition bc = BoundaryCondition::Periodic;
  double dt = 0.0;
  std::vector<State> snapshots;
  // n_steps x 2C: columns [0, C) left boundary, [C, 2C) right boundary.
  Field boundary_flux_log;
  bool diverged = false;
  std::string error;

  std::size_t n_steps() const noexcept { return boundary_flux_log.rows(); }
  std::size_t n_components() const noexcept { return snapshots.empty() ? 0 : snapshots.front().n_components(); }
};

// Advances n_steps fixed steps of size dt. On StepDiverged or
// NonPhysicalState the partial record is returned with `diverged` set.
RolloutRecord rollout(const Grid& grid, BoundaryCondition bc, const State& initial, std::size_t n_steps,
                      double dt, const RhsOperator& rhs);

// C(q)(t_l) for every snapshot l, from the logged effective boundary fluxes.
std::vector<double> conservation_remainder(const RolloutRecord& record, std::size_t component);

// Number of steps and the uniform dt that land exactly on T with
// dt <= step_ratio * dx.
struct StepSchedule {
  std::size_t n_steps = 0;
  double dt = 0.0;
};
StepSchedule schedule(double final_time, double dx, double step_ratio);

double mean_squared_error(const Field& prediction, const Field& reference);

// 0.5 * log2(mse_coarse / mse_fine): the rate of the root-mean-square error.
double refinement_order(double mse_coarse, double mse_fine);

struct Diagnostics {
  std::vector<std::size_t> meshes;
  std::vector<double> mse;
  std::vector<double> order;  // order[0] is NaN (no coarser level)
};

// predictions[k] and references[k] share mesh level k, ordered coarse to fine.
Diagnostics mse_and_order(const std::vector<Field>& predictions, const std::vector<Field>& references);

// Averages consecutive blocks of `factor` cells (coarsening a fine reference).
Field block_average(const Field& fine, std::size_t factor);

}  // namespace hyperweno::stepper
