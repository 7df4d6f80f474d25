#include "hyperweno/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "hyperweno/autodiff/ops.hpp"
#include "hyperweno/diff.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"
#include "hyperweno/networks.hpp"
#include "hyperweno/stepper.hpp"
#include "json.hpp"

namespace hyperweno::training {

namespace {

constexpr std::string_view kTrajectoryMagic = "HWTRJ1";
constexpr std::string_view kFluxMagic = "HWFLX1";

ad::Tensor as_tensor(const Field& f) { return ad::Tensor(ad::Shape{f.rows(), f.cols()}, f.values()); }

void check_admissible(const ad::Var& u) {
  for (double v : u.value().data) {
    if (!(std::abs(v) <= stepper::kDivergenceThreshold)) {
      throw StepDiverged("unrolled step left the admissible band (value " + std::to_string(v) + ")");
    }
  }
}


stepper::RolloutRecord classical_run(const physics::SystemSpec& sys, const Grid& grid, BoundaryCondition bc,
                                     const State& s0, std::size_t n_steps, double dt) {
  const scheme::Model model = scheme::make_model(scheme::SchemeKind::Classical, sys, 0);
  return scheme::run_rollout(model, grid, bc, s0, n_steps, dt);
}

}  // namespace

const Trajectory& TrajectoryDataset::at(std::size_t i, std::size_t l) const {
  if (i >= n_traj || l >= levels.size()) {
    throw InvalidArgument("dataset: no trajectory (" + std::to_string(i) + ", " + std::to_string(l) + ")");
  }
  return trajectories[i * levels.size() + l];
}

TrajectoryDataset generate_dataset(const physics::SystemSpec& system, BoundaryCondition bc, const IcSampler& sampler,
                                   const GenerateConfig& cfg, std::vector<std::string>* log) {
  if (cfg.levels.empty()) throw InvalidArgument("generate_dataset: no mesh levels");
  if (cfg.n_traj == 0) throw InvalidArgument("generate_dataset: n_traj must be positive");
  if (!(cfg.final_time > 0.0)) throw InvalidArgument("generate_dataset: final time must be positive");
  for (std::size_t n : cfg.levels) {
    if (cfg.coarsen_from != 0 && cfg.coarsen_from % n != 0) {
      throw InvalidArgument("generate_dataset: fine mesh " + std::to_string(cfg.coarsen_from) +
                            " is not a multiple of level " + std::to_string(n));
    }
  }
  TrajectoryDataset ds;
  ds.system = system;
  ds.bc = bc;
  ds.final_time = cfg.final_time;
  ds.step_ratio = cfg.step_ratio;
  ds.levels = cfg.levels;
  ds.n_traj = cfg.n_traj;
  ds.provenance = cfg.coarsen_from == 0 ? "native" : "coarsened:" + std::to_string(cfg.coarsen_from);

  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > cfg.max_resamples) {
        throw StepDiverged("generate_dataset: instance " + std::to_string(i) + " diverged after " +
                           std::to_string(cfg.max_resamples) + " redraws");
      }
      const benchmarks::ProblemInstance inst = sampler(rng);
      if (inst.system.kind != system.kind) throw InvalidArgument("generate_dataset: sampler system mismatch");
      ds.family = inst.family;
      ds.x_lo = inst.x_lo;
      ds.x_hi = inst.x_hi;
      std::vector<Trajectory> level_runs;
      std::string failure;
      for (std::size_t l = 0; l < cfg.levels.size() && failure.empty(); ++l) {
        const std::size_t n = cfg.levels[l];
        const Grid grid = make_grid(inst.x_lo, inst.x_hi, n);
        const auto sched = stepper::schedule(cfg.final_time, grid.dx, cfg.step_ratio);
        Trajectory tr{i, l, grid, sched.dt, inst.params, {}};
        if (cfg.coarsen_from == 0) {
          const auto rec = classical_run(system, grid, bc, benchmarks::instantiate_ic(inst, grid), sched.n_steps,
                                         sched.dt);
          if (rec.diverged) failure = rec.error;
          for (const auto& s : rec.snapshots) tr.snapshots.push_back(s.u);
        } else {
          const std::size_t f = cfg.coarsen_from / n;
          const Grid fine = make_grid(inst.x_lo, inst.x_hi, cfg.coarsen_from);
          const auto rec = classical_run(system, fine, bc, benchmarks::instantiate_ic(inst, fine),
                                         sched.n_steps * f, sched.dt / static_cast<double>(f));
          if (rec.diverged) failure = rec.error;
          for (std::size_t m = 0; m < rec.snapshots.size(); m += f)
            tr.snapshots.push_back(stepper::block_average(rec.snapshots[m].u, f));
        }
        level_runs.push_back(std::move(tr));
      }
      if (failure.empty()) {
        for (auto& t : level_runs) ds.trajectories.push_back(std::move(t));
        break;
      }
      if (log != nullptr) {
        std::ostringstream os;
        os << "instance " << i << " resampled (attempt " << attempt + 1 << "): " << failure;
        log->push_back(os.str());
      }
    }
  }
  return ds;
}

TrajectoryDataset generate_dataset(const benchmarks::Benchmark& bench, const GenerateConfig& cfg,
                                   std::vector<std::string>* log) {
  return generate_dataset(
      bench.system, bench.bc, [&bench](std::mt19937_64& rng) { return bench.sample_instance(rng); }, cfg, log);
}

std::string encode_trajectory(const TrajectoryFile& f) {
  io::ByteWriter w;
  w.bytes(kTrajectoryMagic);
  w.u32(kTrajectoryVersion);
  w.u32(static_cast<std::uint32_t>(f.n_components));
  w.u32(static_cast<std::uint32_t>(f.n_cells));
  w.u32(static_cast<std::uint32_t>(f.snapshots.size()));
  w.f64(f.dx);
  w.f64(f.dt);
  w.u32(static_cast<std::uint32_t>(f.ic_params.size()));
  for (double v : f.ic_params) w.f64(v);
  for (const Field& s : f.snapshots) {
    if (s.rows() != f.n_cells || s.cols() != f.n_components) throw ShapeError("trajectory: snapshot shape mismatch");
    for (double v : s.values()) w.f64(v);
  }
  if (f.boundary_flux) {
    w.bytes(kFluxMagic);
    w.u32(static_cast<std::uint32_t>(f.boundary_flux->rows()));
    w.u32(static_cast<std::uint32_t>(f.boundary_flux->cols()));
    for (double v : f.boundary_flux->values()) w.f64(v);
  }
  return w.data();
}

TrajectoryFile decode_trajectory(std::string_view bytes) {
  io::ByteReader r{std::string(bytes)};
  r.expect_magic(kTrajectoryMagic);
  const std::size_t ver_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kTrajectoryVersion) throw FormatError("unsupported trajectory version " + std::to_string(version), ver_at);
  TrajectoryFile f;
  const std::size_t shape_at = r.offset();
  f.n_components = r.u32();
  f.n_cells = r.u32();
  const std::uint32_t n_snap = r.u32();
  if (f.n_components == 0 || f.n_components > 3 || f.n_cells == 0) {
    throw FormatError("bad trajectory shape", shape_at);
  }
  f.dx = r.f64();
  f.dt = r.f64();
  const std::uint32_t n_par = r.u32();
  f.ic_params.resize(r.checked_count(n_par, 1, 8));
  for (double& v : f.ic_params) v = r.f64();
  const std::size_t per = r.checked_count(f.n_cells, f.n_components, 8);
  r.checked_count(per, n_snap, 8);
  for (std::uint32_t m = 0; m < n_snap; ++m) {
    Field s(f.n_cells, f.n_components);
    for (double& v : s.values()) v = r.f64();
    f.snapshots.push_back(std::move(s));
  }
  if (!r.at_end()) {
    r.expect_magic(kFluxMagic);
    const std::uint32_t rows = r.u32(), cols = r.u32();
    const std::size_t n = r.checked_count(rows, cols, 8);
    Field flux(rows, cols);
    for (std::size_t k = 0; k < n; ++k) flux.values()[k] = r.f64();
    f.boundary_flux = std::move(flux);
    if (!r.at_end()) throw FormatError("trailing bytes after boundary-flux block", r.offset());
  }
  return f;
}

void save_trajectory(const std::filesystem::path& path, const TrajectoryFile& f) {
  io::atomic_write(path, encode_trajectory(f));
}

TrajectoryFile load_trajectory(const std::filesystem::path& path) { return decode_trajectory(io::read_file(path)); }

namespace {

std::string trajectory_file_name(std::size_t i, std::size_t n) {
  return "traj_" + std::to_string(i) + "_N" + std::to_string(n) + ".hwtrj";
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const TrajectoryDataset& ds) {
  std::filesystem::create_directories(dir);
  nlohmann::json m;
  m["format"] = "hyperweno-dataset";
  m["system"] = {{"kind", physics::to_string(ds.system.kind)}, {"g", ds.system.g}, {"gamma", ds.system.gamma}};
  m["bc"] = to_string(ds.bc);
  m["family"] = benchmarks::to_string(ds.family);
  m["domain"] = {ds.x_lo, ds.x_hi};
  m["final_time"] = ds.final_time;
  m["step_ratio"] = ds.step_ratio;
  m["levels"] = ds.levels;
  m["n_traj"] = ds.n_traj;
  m["provenance"] = ds.provenance;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& t : ds.trajectories) {
    const std::string name = trajectory_file_name(t.instance, t.grid.n_cells);
    TrajectoryFile f{t.snapshots.front().cols(), t.grid.n_cells, t.grid.dx, t.dt, t.ic_params, t.snapshots, {}};
    save_trajectory(dir / name, f);
    files.push_back({{"instance", t.instance}, {"level", t.level}, {"file", name}});
  }
  m["files"] = files;
  io::atomic_write(dir / "manifest.json", m.dump(2) + "\n");
}

TrajectoryDataset load_dataset(const std::filesystem::path& dir) {
  const std::string text = io::read_file(dir / "manifest.json");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("dataset manifest: ") + e.what(), e.byte);
  }
  TrajectoryDataset ds;
  try {
    const auto kind = physics::parse_system_kind(m.at("system").at("kind").get<std::string>());
    ds.system = {kind, m.at("system").at("g").get<double>(), m.at("system").at("gamma").get<double>()};
    ds.bc = parse_boundary_condition(m.at("bc").get<std::string>());
    ds.family = benchmarks::parse_ic_family(m.at("family").get<std::string>());
    ds.x_lo = m.at("domain").at(0).get<double>();
    ds.x_hi = m.at("domain").at(1).get<double>();
    ds.final_time = m.at("final_time").get<double>();
    ds.step_ratio = m.at("step_ratio").get<double>();
    ds.levels = m.at("levels").get<std::vector<std::size_t>>();
    ds.n_traj = m.at("n_traj").get<std::size_t>();
    ds.provenance = m.value("provenance", std::string("native"));
    ds.trajectories.resize(ds.n_traj * ds.levels.size());
    for (const auto& e : m.at("files")) {
      const std::size_t i = e.at("instance").get<std::size_t>(), l = e.at("level").get<std::size_t>();
      if (i >= ds.n_traj || l >= ds.levels.size()) throw FormatError("dataset manifest: entry out of range");
      const TrajectoryFile f = load_trajectory(dir / e.at("file").get<std::string>());
      if (f.n_cells != ds.levels[l] || f.n_components != ds.system.n_components()) {
        throw FormatError("dataset: " + e.at("file").get<std::string>() + " does not match its mesh level");
      }
      Trajectory& t = ds.trajectories[i * ds.levels.size() + l];
      t.instance = i;
      t.level = l;
      t.grid = make_grid(ds.x_lo, ds.x_hi, f.n_cells);
      t.dt = f.dt;
      t.ic_params = f.ic_params;
      t.snapshots = f.snapshots;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dataset manifest: ") + e.what());
  }
  for (const auto& t : ds.trajectories) {
    if (t.snapshots.empty()) throw FormatError("dataset: manifest does not cover every (instance, level)");
  }
  return ds;
}

Window make_window(const TrajectoryDataset& ds, std::size_t i, std::size_t l, std::size_t start,
                   std::size_t length) {
  const Trajectory& t = ds.at(i, l);
  if (t.n_steps() < length) {
    throw InvalidArgument("window: trajectory has " + std::to_string(t.n_steps()) + " steps, window needs " +
                          std::to_string(length));
  }
  if (start > t.n_steps() - length) throw InvalidArgument("window: start index out of range");
  Window w{i, l, start, length, &t, {}};
  w.metadata = networks::build_metadata(t.grid, t.snapshots[start]);
  return w;
}

Window sample_window(const TrajectoryDataset& ds, std::size_t i, std::size_t l, std::size_t length,
                     std::mt19937_64& rng) {
  const Trajectory& t = ds.at(i, l);
  if (t.n_steps() < length) {
    throw InvalidArgument("window: M_l = " + std::to_string(t.n_steps()) + " < L = " + std::to_string(length));
  }
  std::uniform_int_distribution<std::size_t> d(0, t.n_steps() - length);
  return make_window(ds, i, l, d(rng), length);
}

ad::Var unrolled_loss(const scheme::Model& model, const ad::BoundParameters* params, const Window& w,
                      std::size_t K, BoundaryCondition bc, ad::Tape& tape) {
  if (K < 1 || K > w.length) throw InvalidArgument("unrolled loss: need 1 <= K <= L");
  const Grid& grid = w.trajectory->grid;
  const diff::Solver solver(model, params, grid, bc, tape.constant(as_tensor(w.metadata)));
  ad::Var u = tape.constant(as_tensor(w.snapshot(0)));
  ad::Var acc;
  for (std::size_t k = 1; k <= K; ++k) {
    u = solver.step(u, w.trajectory->dt);
    check_admissible(u);
    const ad::Var err = ad::sub(u, tape.constant(as_tensor(w.snapshot(k))));
    const ad::Var term = ad::reduce_sum(ad::square(err));
    acc = k == 1 ? term : ad::add(acc, term);
  }
  return ad::scale(acc, grid.dx / static_cast<double>(K));
}

double window_loss(const scheme::Model& model, const Window& w, std::size_t K, BoundaryCondition bc) {
  if (K < 1 || K > w.length) throw InvalidArgument("window loss: need 1 <= K <= L");
  const Grid& grid = w.trajectory->grid;
  const scheme::Instance inst(model, grid, bc, w.snapshot(0));
  const auto op = inst.op();
  Field u = w.snapshot(0);
  double acc = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    u = stepper::ssp_rk3_step(u, w.trajectory->dt, op).u;
    const Field& ref = w.snapshot(k);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double e = u.values()[j] - ref.values()[j];
      s += e * e;
    }
    acc += s;
  }
  return acc * grid.dx / static_cast<double>(K);
}

BatchGradient batch_gradient(const scheme::Model& model, const std::vector<const Window*>& batch, std::size_t K,
                             BoundaryCondition bc, std::size_t threads) {
  struct Slot {
    bool valid = false;
    double loss = 0.0;
    ad::Gradients grads;
  };
  std::vector<Slot> slots(batch.size());
  const auto names = model.trainable_names();
  auto work = [&](std::size_t b) {
    ad::Tape tape;
    ad::BoundParameters bp(tape, model.params, names, true);
    try {
      const ad::Var loss = unrolled_loss(model, &bp, *batch[b], K, bc, tape);
      tape.backward(loss);
      slots[b].loss = loss.value().item();
      bp.accumulate_grads(slots[b].grads);
      slots[b].valid = std::isfinite(slots[b].loss);
    } catch (const StepDiverged&) {
      slots[b].valid = false;
    } catch (const NonPhysicalState&) {
      slots[b].valid = false;
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, batch.size()));
  if (n_threads == 1) {
    for (std::size_t b = 0; b < batch.size(); ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < batch.size(); b += n_threads) work(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Merge in batch order so results do not depend on thread scheduling.
  BatchGradient out;
  for (const auto& s : slots) out.valid += s.valid ? 1 : 0;
  if (out.valid == 0) return out;
  const double w = 1.0 / static_cast<double>(out.valid);
  for (const auto& s : slots) {
    if (!s.valid) continue;
    out.loss += w * s.loss;
    ad::add_into(out.grads, s.grads, w);
  }
  return out;
}

TrainResult train(scheme::Model& model, const TrajectoryDataset& ds, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (!model.learned_weights()) throw InvalidArgument("train: scheme has no trainable parameters");
  if (model.system.kind != ds.system.kind) throw InvalidArgument("train: model and dataset systems differ");
  if (cfg.batch_size == 0) throw InvalidArgument("train: batch size must be positive");
  if (cfg.unroll < 1 || cfg.unroll > cfg.window) throw InvalidArgument("train: need 1 <= K <= L");
  for (const auto& t : ds.trajectories) {
    if (t.n_steps() < cfg.window) {
      throw InvalidArgument("train: level N=" + std::to_string(t.grid.n_cells) + " has " +
                            std::to_string(t.n_steps()) + " steps, fewer than L=" + std::to_string(cfg.window));
    }
  }
  TrainResult result;
  result.optimizer.config = cfg.adam;
  std::mt19937_64 rng(cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<Window> windows;
    for (std::size_t i = 0; i < ds.n_traj; ++i)
      for (std::size_t l = 0; l < ds.levels.size(); ++l) windows.push_back(sample_window(ds, i, l, cfg.window, rng));
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.windows = windows.size();
    double loss_sum = 0.0;
    std::size_t valid = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      std::vector<const Window*> batch;
      for (std::size_t b = b0; b < std::min(order.size(), b0 + cfg.batch_size); ++b) batch.push_back(&windows[order[b]]);
      BatchGradient bg = batch_gradient(model, batch, cfg.unroll, ds.bc, cfg.threads);
      rec.invalid += batch.size() - bg.valid;
      if (bg.valid == 0) continue;
      loss_sum += bg.loss * static_cast<double>(bg.valid);
      valid += bg.valid;
      if (cfg.clip_norm > 0.0) ad::clip_global_norm(bg.grads, cfg.clip_norm);
      ad::adam_step(model.params, bg.grads, result.optimizer);
    }
    rec.loss = valid > 0 ? loss_sum / static_cast<double>(valid) : std::nan("");
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (2 * rec.invalid > rec.windows) {
      std::ostringstream os;
      os << "training aborted in epoch " << epoch << ": " << rec.invalid << " of " << rec.windows
         << " windows diverged or became non-physical";
      throw TrainingAborted(os.str());
    }
    result.optimizer.config.learning_rate *= cfg.lr_decay;
    if (cfg.checkpoint_every != 0 && !cfg.checkpoint_path.empty() && epoch % cfg.checkpoint_every == 0) {
      scheme::save_model(cfg.checkpoint_path, model);
    }
  }
  return result;
}

double evaluate_loss(const scheme::Model& model, const TrajectoryDataset& ds, const std::vector<Window>& windows,
                     std::size_t K) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : windows) {
    try {
      const double l = window_loss(model, w, K, ds.bc);
      if (std::isfinite(l)) {
        sum += l;
        ++n;
      }
    } catch (const StepDiverged&) {
    } catch (const NonPhysicalState&) {
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : std::nan("");
}

double dataset_loss(const scheme::Model& model, const TrajectoryDataset& ds, std::size_t L, std::size_t K) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ds.n_traj; ++i) {
    for (std::size_t l = 0; l < ds.levels.size(); ++l) {
      const Trajectory& t = ds.at(i, l);
      if (t.n_steps() < L) throw InvalidArgument("dataset loss: M_l = " + std::to_string(t.n_steps()) + " < L");
      std::vector<Window> ws;
      for (std::size_t s = 0; s + L <= t.n_steps(); ++s) ws.push_back(make_window(ds, i, l, s, L));
      const double v = evaluate_loss(model, ds, ws, K);
      if (std::isfinite(v)) {
        sum += v;
        ++n;
      }
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : std::nan("");
}

void write_loss_history(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  io::CsvTable t({"epoch", "loss", "wall_seconds"});
  for (const auto& r : history) t.add_row({static_cast<double>(r.epoch), r.loss, r.wall_seconds});
  t.write(path);
}

}  // namespace hyperweno::training
