#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hyperweno/autodiff/optim.hpp"
#include "hyperweno/autodiff/parameters.hpp"
#include "hyperweno/autodiff/tape.hpp"
#include "hyperweno/benchmarks.hpp"
#include "hyperweno/grid.hpp"
#include "hyperweno/scheme.hpp"

namespace hyperweno::training {

// Snapshots of one instance on one mesh level at t_m = m dt.
struct Trajectory {
  std::size_t instance = 0;
  std::size_t level = 0;
  Grid grid;
  double dt = 0.0;
  std::vector<double> ic_params;
  std::vector<Field> snapshots;  // M + 1 entries, N x C each

  std::size_t n_steps() const noexcept { return snapshots.empty() ? 0 : snapshots.size() - 1; }
};

struct TrajectoryDataset {
  physics::SystemSpec system;
  BoundaryCondition bc = BoundaryCondition::Periodic;
  benchmarks::IcFamily family = benchmarks::IcFamily::Sine;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double final_time = 0.0;
  double step_ratio = 0.4;
  std::vector<std::size_t> levels;  // N per mesh level
  std::size_t n_traj = 0;
  // "native" (classical WENO5 on each level) or "coarsened:<N>".
  std::string provenance = "native";
  std::vector<Trajectory> trajectories;  // index i * levels.size() + l

  const Trajectory& at(std::size_t i, std::size_t l) const;
};

using IcSampler = std::function<benchmarks::ProblemInstance(std::mt19937_64&)>;

struct GenerateConfig {
  std::vector<std::size_t> levels;
  double final_time = 1.5;
  double step_ratio = 0.4;
  std::size_t n_traj = 20;
  std::uint64_t seed = 0;
  // 0: native runs per level. Otherwise each level is the block average of a
  // run on this many cells (a multiple of every level).
  std::size_t coarsen_from = 0;
  std::size_t max_resamples = 100;
};

// Classical WENO5 rollouts for every (instance, level). Instances whose
// rollout diverges on any level are redrawn; each event goes to `log`.
TrajectoryDataset generate_dataset(const physics::SystemSpec& system, BoundaryCondition bc, const IcSampler& sampler,
                                   const GenerateConfig& cfg, std::vector<std::string>* log = nullptr);
TrajectoryDataset generate_dataset(const benchmarks::Benchmark& bench, const GenerateConfig& cfg,
                                   std::vector<std::string>* log = nullptr);

// Trajectory files (HWTRJ1), optionally carrying a boundary-flux trailer
// (HWFLX1: u32 rows, u32 cols, f64 data) for rollout records.
struct TrajectoryFile {
  std::size_t n_components = 0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  double dt = 0.0;
  std::vector<double> ic_params;
  std::vector<Field> snapshots;
  std::optional<Field> boundary_flux;
};

inline constexpr std::uint32_t kTrajectoryVersion = 1;

std::string encode_trajectory(const TrajectoryFile& f);
TrajectoryFile decode_trajectory(std::string_view bytes);
void save_trajectory(const std::filesystem::path& path, const TrajectoryFile& f);
TrajectoryFile load_trajectory(const std::filesystem::path& path);

// Directory layout: manifest.json plus one .hwtrj per (instance, level).
void save_dataset(const std::filesystem::path& dir, const TrajectoryDataset& ds);
TrajectoryDataset load_dataset(const std::filesystem::path& dir);

struct Window {
  std::size_t instance = 0;
  std::size_t level = 0;
  std::size_t start = 0;
  std::size_t length = 0;  // L; the window holds L + 1 snapshots
  const Trajectory* trajectory = nullptr;
  Field metadata;  // built from the window's first snapshot

  const Field& snapshot(std::size_t k) const { return trajectory->snapshots[start + k]; }
};

Window make_window(const TrajectoryDataset& ds, std::size_t i, std::size_t l, std::size_t start, std::size_t length);
// Start index uniform on {0, ..., M_l - L}.
Window sample_window(const TrajectoryDataset& ds, std::size_t i, std::size_t l, std::size_t length,
                     std::mt19937_64& rng);

// (1/K) sum_{k=1..K} dx sum_j (u_hat_k - u_ref_k)^2 on the tape. Throws
// StepDiverged / NonPhysicalState when a step leaves the admissible band.
ad::Var unrolled_loss(const scheme::Model& model, const ad::BoundParameters* params, const Window& w,
                      std::size_t K, BoundaryCondition bc, ad::Tape& tape);

// The same quantity through the fast solver; no gradients.
double window_loss(const scheme::Model& model, const Window& w, std::size_t K, BoundaryCondition bc);

struct TrainConfig {
  std::size_t window = 20;
  std::size_t unroll = 4;
  std::size_t epochs = 100;
  std::size_t batch_size = 8;
  ad::AdamConfig adam;
  double lr_decay = 0.95;  // learning rate multiplied by this after every epoch
  double clip_norm = 1.0;  // <= 0 disables clipping
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t checkpoint_every = 0;  // epochs; 0 disables
  std::filesystem::path checkpoint_path;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean over the epoch's valid windows, before each update
  double wall_seconds = 0.0;
  std::size_t invalid = 0;
  std::size_t windows = 0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  ad::OptimizerState optimizer;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batched Adam on model.trainable_names(); one fresh window per (i, l)
// per epoch. Throws TrainingAborted when more than half of an epoch's
// windows are invalid.
TrainResult train(scheme::Model& model, const TrajectoryDataset& ds, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Loss and merged gradients of a batch of windows (mean over valid ones).
struct BatchGradient {
  double loss = 0.0;
  std::size_t valid = 0;
  ad::Gradients grads;
};
BatchGradient batch_gradient(const scheme::Model& model, const std::vector<const Window*>& batch, std::size_t K,
                             BoundaryCondition bc, std::size_t threads = 1);

// Mean window_loss over fixed windows; invalid windows are skipped.
double evaluate_loss(const scheme::Model& model, const TrajectoryDataset& ds, const std::vector<Window>& windows,
                     std::size_t K);

// Trajectory loss with every admissible start: the mean over (i, l) of the
// mean window loss over s = 0..M_l - L. This is the quantity the sampled
// epochs minimize in expectation.
double dataset_loss(const scheme::Model& model, const TrajectoryDataset& ds, std::size_t L, std::size_t K);

void write_loss_history(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

}  // namespace hyperweno::training
