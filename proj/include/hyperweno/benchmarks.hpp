#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperweno/grid.hpp"
#include "hyperweno/physics.hpp"
#include "hyperweno/scheme.hpp"

namespace hyperweno::benchmarks {

// Initial-condition families. Parameter vectors, in order:
//   sine:           a, b                        u = a + b sin x
//   two_state:      y1, y2, x1, x2              y1 on [min, max], y2 elsewhere
//   piecewise:      v0, x1, v1, x2, v2, ...     v_k on [x_k, x_{k+1})
//   riemann_sw:     h_l, h_r, v_l, v_r, x0
//   shu_osher:      rho_l, u_l, p_l, p_r, eps, x0, x1
enum class IcFamily { Sine, TwoState, Piecewise, RiemannSw, ShuOsher };

std::string_view to_string(IcFamily f) noexcept;
IcFamily parse_ic_family(std::string_view name);
// Required parameter count; 0 for variable length (piecewise).
std::size_t family_arity(IcFamily f) noexcept;

struct ParamRange {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct ProblemInstance {
  physics::SystemSpec system;
  BoundaryCondition bc = BoundaryCondition::Periodic;
  double x_lo = 0.0;
  double x_hi = 1.0;
  IcFamily family = IcFamily::Sine;
  std::vector<double> params;
  double final_time = 0.0;
  double step_ratio = 0.4;  // dt / dx
  std::vector<std::size_t> meshes;
  bool extrapolation = false;
};

void validate(const ProblemInstance& inst);

// Point value of the conserved variables at x (u, (h, hv) or (rho, rho u, E)).
void point_state(const ProblemInstance& inst, double x, std::span<double> out);

// Locations where the IC (or a derivative) jumps; cell averaging splits there.
std::vector<double> breakpoints(const ProblemInstance& inst);

// Cell averages: exact across breakpoints, Gauss-Legendre with `points` nodes
// on each smooth piece.
State instantiate_ic(const ProblemInstance& inst, const Grid& grid, std::size_t points = 4);

// Nodes and weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre(std::size_t points);

struct ExperimentGroup {
  std::string purpose;  // refinement, unseen-mesh, ic-extrapolation, dt-sensitivity, mse-table, cost
  std::vector<double> params;  // empty: the fixed test instance
  IcFamily family = IcFamily::Sine;
  bool custom_instance = false;
  bool extrapolation = false;
  std::vector<std::size_t> meshes;
  std::vector<double> times;
  std::vector<double> step_ratios;  // empty: the benchmark default
  std::vector<scheme::SchemeKind> schemes;
};

struct Benchmark {
  std::string id;
  physics::SystemSpec system;
  BoundaryCondition bc = BoundaryCondition::Periodic;
  double x_lo = 0.0;
  double x_hi = 1.0;

  IcFamily sample_family = IcFamily::Sine;
  std::vector<ParamRange> ranges;
  IcFamily test_family = IcFamily::Sine;
  std::vector<double> test_params;

  double train_time = 1.0;
  double step_ratio = 0.4;
  std::vector<std::size_t> train_levels;
  std::size_t reference_mesh = 512;
  std::size_t window = 20;
  std::size_t unroll = 4;
  std::size_t n_traj = 200;

  std::vector<ExperimentGroup> experiments;

  ProblemInstance test_instance() const;
  // Training instance with parameters drawn uniformly from `ranges`.
  ProblemInstance sample_instance(std::mt19937_64& rng) const;
  bool within_ranges(std::span<const double> params) const;
};

Benchmark parse_benchmark(std::string_view json_text);
// `id_or_path` is a file path or a benchmark id looked up in the data
// directory ($HYPERWENO_DATA_DIR, else the build-time default).
Benchmark load_benchmark(std::string_view id_or_path);
std::filesystem::path data_directory();
std::vector<std::string> benchmark_ids();

struct Experiment {
  std::string benchmark;
  std::string purpose;
  ProblemInstance instance;
  std::size_t mesh = 0;
  scheme::SchemeKind scheme = scheme::SchemeKind::Classical;
  double final_time = 0.0;
  double step_ratio = 0.4;

  std::string key() const;
};

// Every run behind the benchmark's results, plus one classical reference run
// on the reference mesh per distinct (instance, final time).
std::vector<Experiment> experiment_matrix(const Benchmark& bench);

// One run of `model` on `inst` with N cells to time T at the instance's step
// ratio (step_ratio <= 0: use inst.step_ratio).
stepper::RolloutRecord run_instance(const scheme::Model& model, const ProblemInstance& inst, std::size_t n_cells,
                                    double final_time, double step_ratio = 0.0);

struct ConvergenceRow {
  std::size_t n_cells = 0;
  double mse = 0.0;
  double order = 0.0;  // NaN on the first row
  bool diverged = false;
};

// MSE at time T against a classical run on `reference_mesh` block-averaged
// onto each mesh (reference_mesh must be a multiple of every mesh). The order
// between consecutive rows is the RMSE rate 0.5 log(mse_prev / mse) / log(N / N_prev).
std::vector<ConvergenceRow> convergence_study(const scheme::Model& model, const ProblemInstance& inst,
                                              const std::vector<std::size_t>& meshes, double final_time,
                                              std::size_t reference_mesh, double step_ratio = 0.0);

}  // namespace hyperweno::benchmarks
