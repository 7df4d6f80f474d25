// hyperweno: data generation, training, rollouts and diagnostics.
//
// Exit codes: 0 ok, 1 other error, 2 usage / invalid argument, 3 I/O,
// 4 file format, 5 a run diverged (StepDiverged / non-physical state),
// 6 training aborted.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hyperweno/benchmarks.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"
#include "hyperweno/training.hpp"
#include "json.hpp"

using namespace hyperweno;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kUsage = 2, kIo = 3, kFormat = 4, kDiverged = 5, kAborted = 6 };

bool g_quiet = false;

void note(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << '\n';
}

// Instance selection shared by rollout-like commands: a benchmark id (its
// fixed test instance) or a JSON file {"benchmark", "family"?, "params"?},
// optionally overridden on the command line.
struct InstanceArgs {
  std::string spec;
  std::string family;
  std::vector<double> params;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a, bool required) {
  auto* o = cmd->add_option("--instance", a.spec, "benchmark id (fixed test instance) or instance JSON file");
  if (required) o->required();
  cmd->add_option("--family", a.family, "override the IC family (sine, two_state, piecewise, riemann_sw, shu_osher)");
  cmd->add_option("--params", a.params, "override the IC parameters")->delimiter(',');
}

benchmarks::ProblemInstance resolve_instance(const InstanceArgs& a, const benchmarks::Benchmark* fallback) {
  benchmarks::Benchmark bench;
  std::optional<benchmarks::IcFamily> family;
  std::vector<double> params;
  if (a.spec.empty()) {
    if (fallback == nullptr) throw InvalidArgument("--instance is required");
    bench = *fallback;
  } else if (a.spec.ends_with(".json")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_file(a.spec));
      bench = benchmarks::load_benchmark(j.at("benchmark").get<std::string>());
      if (j.contains("family")) family = benchmarks::parse_ic_family(j.at("family").get<std::string>());
      if (j.contains("params")) params = j.at("params").get<std::vector<double>>();
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(a.spec + ": " + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(a.spec + ": " + e.what());
    }
  } else {
    bench = benchmarks::load_benchmark(a.spec);
  }
  if (!a.family.empty()) family = benchmarks::parse_ic_family(a.family);
  if (!a.params.empty()) params = a.params;

  benchmarks::ProblemInstance inst = bench.test_instance();
  if (family || !params.empty()) {
    inst.family = family.value_or(inst.family);
    if (!params.empty()) inst.params = params;
    inst.extrapolation = inst.family != bench.sample_family || !bench.within_ranges(inst.params);
  }
  benchmarks::validate(inst);
  return inst;
}

// A learned checkpoint or a parameter-free scheme built for `sys`.
struct ModelArgs {
  std::string ckpt;
  std::string scheme;
};

void add_model_options(CLI::App* cmd, ModelArgs& a) {
  auto* c = cmd->add_option("--ckpt", a.ckpt, "trained checkpoint (HWCK1)");
  auto* s = cmd->add_option("--scheme", a.scheme, "parameter-free scheme instead of a checkpoint (classical, linear)");
  c->excludes(s);
  s->excludes(c);
}

scheme::Model resolve_model(const ModelArgs& a, const physics::SystemSpec& sys) {
  if (!a.ckpt.empty()) {
    scheme::Model m = scheme::load_model(a.ckpt);
    if (m.system.kind != sys.kind) {
      throw InvalidArgument("checkpoint is for " + std::string(physics::to_string(m.system.kind)) + ", instance is " +
                            std::string(physics::to_string(sys.kind)));
    }
    return m;
  }
  const scheme::SchemeKind kind = scheme::parse_scheme_kind(a.scheme.empty() ? "classical" : a.scheme);
  if (kind == scheme::SchemeKind::HyperCfcnn || kind == scheme::SchemeKind::HyperCfcnnF) {
    throw InvalidArgument("learned schemes need --ckpt");
  }
  return scheme::make_model(kind, sys, 0);
}

std::uint64_t env_seed() {
  if (const char* s = std::getenv("HYPERWENO_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("HYPERWENO_SEED is not an unsigned integer: ") + s);
    }
  }
  return 0;
}

// Long-format snapshot table: one row per (snapshot, cell).
void write_snapshots_csv(const std::filesystem::path& path, const stepper::RolloutRecord& rec, std::size_t every) {
  const std::size_t nc = rec.n_components();
  std::vector<std::string> header{"x"};
  for (std::size_t c = 0; c < nc; ++c) header.push_back("component_" + std::to_string(c));
  header.push_back("t");
  io::CsvTable t(header);
  const std::size_t last = rec.snapshots.size() - 1;
  for (std::size_t m = 0; m <= last; ++m) {
    if (m != 0 && m != last && (every == 0 || m % every != 0)) continue;
    const State& s = rec.snapshots[m];
    for (std::size_t j = 0; j < s.u.rows(); ++j) {
      std::vector<double> row{rec.grid.x_mid[j]};
      for (std::size_t c = 0; c < nc; ++c) row.push_back(s.u(j, c));
      row.push_back(s.t);
      t.add_row(row);
    }
  }
  t.write(path);
}

void write_record(const std::filesystem::path& path, const stepper::RolloutRecord& rec,
                  const std::vector<double>& ic_params) {
  training::TrajectoryFile f;
  f.n_components = rec.n_components();
  f.n_cells = rec.grid.n_cells;
  f.dx = rec.grid.dx;
  f.dt = rec.dt;
  f.ic_params = ic_params;
  for (const auto& s : rec.snapshots) f.snapshots.push_back(s.u);
  f.boundary_flux = rec.boundary_flux_log;
  training::save_trajectory(path, f);
}

void emit(const io::CsvTable& t, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << t.str();
  } else {
    t.write(out);
  }
}

int run_gen_data(const std::string& bench_id, const std::string& out, std::size_t n_traj, std::uint64_t seed,
                 std::vector<std::size_t> levels, double cfl, double final_time, std::size_t coarsen_from) {
  const auto bench = benchmarks::load_benchmark(bench_id);
  training::GenerateConfig gc;
  gc.levels = levels.empty() ? std::vector<std::size_t>(bench.train_levels.begin(),
                                                        bench.train_levels.begin() +
                                                            std::min<std::size_t>(2, bench.train_levels.size()))
                             : levels;
  gc.final_time = final_time > 0.0 ? final_time : bench.train_time;
  gc.step_ratio = cfl > 0.0 ? cfl : bench.step_ratio;
  gc.n_traj = n_traj;
  gc.seed = seed;
  gc.coarsen_from = coarsen_from;
  std::vector<std::string> log;
  const auto ds = training::generate_dataset(bench, gc, &log);
  for (const auto& l : log) note(l);
  training::save_dataset(out, ds);
  std::ostringstream os;
  os << "wrote " << ds.trajectories.size() << " trajectories (" << n_traj << " instances x " << gc.levels.size()
     << " levels) to " << out;
  note(os.str());
  return kOk;
}

struct TrainArgs {
  std::string bench_id, data, scheme = "hcfcnn", out, loss_csv;
  std::size_t epochs = 100, K = 0, L = 0, batch = 8, threads = 1, checkpoint_every = 0;
  std::size_t hyper_layers = 6, hyper_channels = 32;
  double lr = 1e-3, lr_decay = 0.95, clip = 1.0;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  const auto bench = benchmarks::load_benchmark(a.bench_id);
  const auto ds = training::load_dataset(a.data);
  if (ds.system.kind != bench.system.kind) throw InvalidArgument("dataset system does not match the benchmark");
  const auto kind = scheme::parse_scheme_kind(a.scheme);
  if (kind != scheme::SchemeKind::HyperCfcnn && kind != scheme::SchemeKind::HyperCfcnnF) {
    throw InvalidArgument("train: --scheme must be hcfcnn or hcfcnn-f");
  }
  networks::HyperNetConfig hyper;
  hyper.layers = a.hyper_layers;
  hyper.channels = a.hyper_channels;
  scheme::Model model = scheme::make_model(kind, ds.system, a.seed, hyper);

  training::TrainConfig tc;
  tc.window = a.L > 0 ? a.L : bench.window;
  tc.unroll = a.K > 0 ? a.K : bench.unroll;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.adam.learning_rate = a.lr;
  tc.lr_decay = a.lr_decay;
  tc.clip_norm = a.clip;
  tc.seed = a.seed;
  tc.threads = a.threads;
  tc.checkpoint_every = a.checkpoint_every;
  tc.checkpoint_path = a.out;

  const double before = training::dataset_loss(model, ds, tc.window, tc.unroll);
  const auto res = training::train(model, ds, tc, [](const training::EpochRecord& r) {
    std::ostringstream os;
    os << "epoch " << r.epoch << " loss " << io::format_double(r.loss) << " invalid " << r.invalid << "/"
       << r.windows << " t " << r.wall_seconds << "s";
    note(os.str());
  });
  const double after = training::dataset_loss(model, ds, tc.window, tc.unroll);
  scheme::save_model(a.out, model);
  training::write_loss_history(a.loss_csv.empty() ? a.out + ".loss.csv" : a.loss_csv, res.history);
  note("trajectory loss " + io::format_double(before) + " -> " + io::format_double(after));
  return kOk;
}

int run_rollout(const ModelArgs& ma, const InstanceArgs& ia, std::size_t mesh, double final_time, double ratio,
                const std::string& out, const std::string& record, std::size_t every) {
  const auto inst = resolve_instance(ia, nullptr);
  const auto model = resolve_model(ma, inst.system);
  const auto rec = benchmarks::run_instance(model, inst, mesh, final_time, ratio);
  write_snapshots_csv(out, rec, every);
  if (!record.empty()) write_record(record, rec, inst.params);
  if (rec.diverged) {
    std::cerr << "rollout diverged after " << rec.n_steps() << " steps: " << rec.error << '\n';
    return kDiverged;
  }
  return kOk;
}

int run_diagnose(const std::string& in, const std::string& out, bool relative) {
  const auto f = training::load_trajectory(in);
  if (!f.boundary_flux) throw FormatError(in + ": no boundary-flux block; write it with rollout --record");
  stepper::RolloutRecord rec;
  rec.grid = make_grid(0.0, f.dx * static_cast<double>(f.n_cells), f.n_cells);
  // Periodic runs log identical left and right fluxes, so the boundary-term
  // form covers both conditions.
  rec.bc = BoundaryCondition::NoFlux;
  rec.dt = f.dt;
  for (std::size_t m = 0; m < f.snapshots.size(); ++m) rec.snapshots.push_back({f.snapshots[m], m * f.dt});
  rec.boundary_flux_log = *f.boundary_flux;
  if (rec.boundary_flux_log.rows() + 1 != rec.snapshots.size() || rec.boundary_flux_log.cols() != 2 * f.n_components) {
    throw FormatError(in + ": boundary-flux block does not match the snapshots");
  }
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> series;
  for (std::size_t c = 0; c < f.n_components; ++c) {
    header.push_back("C_q" + std::to_string(c));
    auto s = stepper::conservation_remainder(rec, c);
    if (relative) {
      const double mass = std::abs(total(f.snapshots.front(), c, f.dx));
      if (mass > 0.0)
        for (double& v : s) v /= mass;
    }
    series.push_back(std::move(s));
  }
  io::CsvTable t(header);
  for (std::size_t m = 0; m < rec.snapshots.size(); ++m) {
    std::vector<double> row{rec.snapshots[m].t};
    for (const auto& s : series) row.push_back(s[m]);
    t.add_row(row);
  }
  emit(t, out);
  return kOk;
}

const benchmarks::ExperimentGroup* find_group(const benchmarks::Benchmark& b, const std::string& purpose) {
  for (const auto& g : b.experiments)
    if (g.purpose == purpose) return &g;
  return nullptr;
}

int run_converge(const std::string& bench_id, const ModelArgs& ma, InstanceArgs ia, std::vector<std::size_t> meshes,
                 double final_time, std::size_t ref_mesh, double ratio, const std::string& out) {
  const auto bench = benchmarks::load_benchmark(bench_id);
  const auto inst = resolve_instance(ia, &bench);
  const auto model = resolve_model(ma, inst.system);
  const auto* table = find_group(bench, "mse-table");
  const auto* refine = find_group(bench, "refinement");
  if (meshes.empty()) meshes = table ? table->meshes : refine ? refine->meshes : bench.train_levels;
  if (final_time <= 0.0) final_time = table ? table->times.front() : bench.train_time;
  const auto rows = benchmarks::convergence_study(model, inst, meshes, final_time,
                                                  ref_mesh > 0 ? ref_mesh : bench.reference_mesh, ratio);
  io::CsvTable t({"N", "mse", "order"});
  bool diverged = false;
  for (const auto& r : rows) {
    t.add_row({static_cast<double>(r.n_cells), r.mse, r.order});
    diverged = diverged || r.diverged;
  }
  emit(t, out);
  return diverged ? kDiverged : kOk;
}

int run_reference(const std::string& bench_id, InstanceArgs ia, std::size_t mesh, double final_time, double ratio,
                  const std::string& out, const std::string& record, std::size_t every) {
  const auto bench = benchmarks::load_benchmark(bench_id);
  const auto inst = resolve_instance(ia, &bench);
  const auto model = scheme::make_model(scheme::SchemeKind::Classical, inst.system, 0);
  const auto rec = benchmarks::run_instance(model, inst, mesh > 0 ? mesh : bench.reference_mesh,
                                            final_time > 0.0 ? final_time : bench.train_time, ratio);
  write_snapshots_csv(out, rec, every);
  if (!record.empty()) write_record(record, rec, inst.params);
  return rec.diverged ? kDiverged : kOk;
}

int run_bench_cost(const ModelArgs& ma, InstanceArgs ia, const std::string& bench_id, std::vector<std::size_t> meshes,
                   double final_time, std::size_t repeat, const std::string& out) {
  benchmarks::ProblemInstance inst;
  benchmarks::Benchmark bench;
  std::optional<scheme::Model> model;
  if (!bench_id.empty()) bench = benchmarks::load_benchmark(bench_id);
  if (!ma.ckpt.empty() && ia.spec.empty() && bench_id.empty()) {
    // Pick the benchmark matching the checkpoint's system.
    model = scheme::load_model(ma.ckpt);
    for (const auto& id : benchmarks::benchmark_ids()) {
      const auto b = benchmarks::load_benchmark(id);
      if (b.system.kind == model->system.kind) {
        bench = b;
        break;
      }
    }
  }
  if (bench.id.empty() && ia.spec.empty()) throw InvalidArgument("bench-cost: give --benchmark, --instance or --ckpt");
  inst = resolve_instance(ia, &bench);
  if (!model) model = resolve_model(ma, inst.system);
  const auto* cost = find_group(bench, "cost");
  if (meshes.empty()) meshes = cost ? cost->meshes : bench.train_levels;
  if (final_time <= 0.0) final_time = cost ? cost->times.front() : bench.train_time;

  io::CsvTable t({"N", "params", "wall_seconds"});
  bool diverged = false;
  for (std::size_t n : meshes) {
    double best = 0.0;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, repeat); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto rec = benchmarks::run_instance(*model, inst, n, final_time);
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      diverged = diverged || rec.diverged;
      best = r == 0 ? s : std::min(best, s);
    }
    const double params = model->learned_weights() ? static_cast<double>(n * model->hyper.target.p_cell()) : 0.0;
    t.add_row({static_cast<double>(n), params, best});
  }
  emit(t, out);
  return diverged ? kDiverged : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperweno: hypernetwork-weighted WENO5 finite-volume solver"};
  app.set_config("--config", "", "INI/TOML file with option values ([subcommand] sections)");
  app.add_flag("-q,--quiet", g_quiet, "no progress output on stderr");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  const std::uint64_t default_seed = [] {
    try {
      return env_seed();
    } catch (const Error& e) {
      std::cerr << e.what() << '\n';
      std::exit(kUsage);
    }
  }();
  seed = default_seed;

  // gen-data
  std::string g_bench, g_out;
  std::size_t g_ntraj = 20, g_coarsen = 0;
  std::vector<std::size_t> g_levels;
  double g_cfl = 0.0, g_T = 0.0;
  auto* gen = app.add_subcommand("gen-data", "classical WENO5 training trajectories");
  gen->add_option("--benchmark", g_bench, "benchmark id or definition file")->required();
  gen->add_option("--out", g_out, "output directory")->required();
  gen->add_option("--n-traj", g_ntraj, "instances drawn from the training ranges")->capture_default_str();
  gen->add_option("--seed", seed, "rng seed (default $HYPERWENO_SEED or 0)");
  gen->add_option("--mesh-levels", g_levels, "cells per level (default: first two training levels)")->delimiter(',');
  gen->add_option("--cfl", g_cfl, "step ratio dt/dx (default: the benchmark's)");
  gen->add_option("--T", g_T, "final time (default: the benchmark's training horizon)");
  gen->add_option("--coarsen-from", g_coarsen, "block-average a run on this many cells instead of native runs");

  // train
  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "train Hyper-CFCNN(-F) on a dataset");
  tr->add_option("--benchmark", ta.bench_id, "benchmark id or definition file")->required();
  tr->add_option("--data", ta.data, "dataset directory from gen-data")->required();
  tr->add_option("--scheme", ta.scheme, "hcfcnn or hcfcnn-f")->capture_default_str();
  tr->add_option("--out", ta.out, "checkpoint path")->required();
  tr->add_option("--loss-csv", ta.loss_csv, "loss history (default <out>.loss.csv)");
  tr->add_option("--epochs", ta.epochs)->capture_default_str();
  tr->add_option("--lr", ta.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--lr-decay", ta.lr_decay, "learning-rate factor per epoch")->capture_default_str();
  tr->add_option("--clip", ta.clip, "global gradient-norm clip (<= 0: off)")->capture_default_str();
  tr->add_option("--K", ta.K, "unroll depth (default: the benchmark's)");
  tr->add_option("--L", ta.L, "window length (default: the benchmark's)");
  tr->add_option("--batch-size", ta.batch)->capture_default_str();
  tr->add_option("--threads", ta.threads, "window rollouts in parallel per batch")->capture_default_str();
  tr->add_option("--checkpoint-every", ta.checkpoint_every, "epochs between checkpoints (0: end only)");
  tr->add_option("--hyper-layers", ta.hyper_layers)->capture_default_str();
  tr->add_option("--hyper-channels", ta.hyper_channels)->capture_default_str();
  tr->add_option("--seed", seed, "rng seed (default $HYPERWENO_SEED or 0)");

  // rollout
  ModelArgs r_model;
  InstanceArgs r_inst;
  std::size_t r_mesh = 0, r_every = 0;
  double r_T = 0.0, r_ratio = 0.0;
  std::string r_out, r_record;
  auto* ro = app.add_subcommand("rollout", "run a scheme on one instance");
  add_model_options(ro, r_model);
  add_instance_options(ro, r_inst, true);
  ro->add_option("--mesh", r_mesh, "cells")->required();
  ro->add_option("--T", r_T, "final time")->required();
  ro->add_option("--dt-ratio", r_ratio, "step ratio dt/dx (default: the benchmark's)");
  ro->add_option("--out", r_out, "snapshot CSV x,component_0..,t")->required();
  ro->add_option("--every", r_every, "also write every k-th snapshot (default: first and last)");
  ro->add_option("--record", r_record, "full record (HWTRJ1 + boundary fluxes) for diagnose");

  // diagnose
  std::string d_in, d_out;
  bool d_rel = false;
  auto* di = app.add_subcommand("diagnose", "conservation remainder series of a rollout record");
  di->add_option("--rollout", d_in, "record written by rollout/reference --record")->required();
  di->add_option("--out", d_out, "CSV t,C_q0,.. (default stdout)");
  di->add_flag("--relative", d_rel, "divide by |initial total| of each component");

  // converge
  std::string c_bench, c_out;
  ModelArgs c_model;
  InstanceArgs c_inst;
  std::vector<std::size_t> c_meshes;
  double c_T = 0.0, c_ratio = 0.0;
  std::size_t c_ref = 0;
  auto* co = app.add_subcommand("converge", "MSE against the reference under refinement");
  co->add_option("--benchmark", c_bench, "benchmark id or definition file")->required();
  add_model_options(co, c_model);
  add_instance_options(co, c_inst, false);
  co->add_option("--meshes", c_meshes, "cells per run (default: the benchmark's table meshes)")->delimiter(',');
  co->add_option("--T", c_T, "final time (default: the benchmark's table time)");
  co->add_option("--reference-mesh", c_ref, "reference cells (default: the benchmark's)");
  co->add_option("--dt-ratio", c_ratio, "step ratio dt/dx (default: the benchmark's)");
  co->add_option("--out", c_out, "CSV N,mse,order (default stdout)");

  // reference
  std::string f_bench, f_out, f_record;
  InstanceArgs f_inst;
  std::size_t f_mesh = 0, f_every = 0;
  double f_T = 0.0, f_ratio = 0.0;
  auto* re = app.add_subcommand("reference", "classical WENO5 run");
  re->add_option("--benchmark", f_bench, "benchmark id or definition file")->required();
  add_instance_options(re, f_inst, false);
  re->add_option("--mesh", f_mesh, "cells (default: the benchmark's reference mesh)");
  re->add_option("--T", f_T, "final time (default: the benchmark's training horizon)");
  re->add_option("--dt-ratio", f_ratio, "step ratio dt/dx (default: the benchmark's)");
  re->add_option("--out", f_out, "snapshot CSV x,component_0..,t")->required();
  re->add_option("--every", f_every, "also write every k-th snapshot");
  re->add_option("--record", f_record, "full record (HWTRJ1 + boundary fluxes)");

  // bench-cost
  ModelArgs b_model;
  InstanceArgs b_inst;
  std::string b_bench, b_out;
  std::vector<std::size_t> b_meshes;
  double b_T = 0.0;
  std::size_t b_repeat = 1;
  auto* bc = app.add_subcommand("bench-cost", "target parameter count and wall-clock per mesh");
  add_model_options(bc, b_model);
  add_instance_options(bc, b_inst, false);
  bc->add_option("--benchmark", b_bench, "benchmark for default instance, meshes and T");
  bc->add_option("--meshes", b_meshes, "cells per run")->delimiter(',');
  bc->add_option("--T", b_T, "final time");
  bc->add_option("--repeat", b_repeat, "runs per mesh; the fastest is reported")->capture_default_str();
  bc->add_option("--out", b_out, "CSV N,params,wall_seconds (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return run_gen_data(g_bench, g_out, g_ntraj, seed, g_levels, g_cfl, g_T, g_coarsen);
    if (*tr) {
      ta.seed = seed;
      return run_train(ta);
    }
    if (*ro) return run_rollout(r_model, r_inst, r_mesh, r_T, r_ratio, r_out, r_record, r_every);
    if (*di) return run_diagnose(d_in, d_out, d_rel);
    if (*co) return run_converge(c_bench, c_model, c_inst, c_meshes, c_T, c_ref, c_ratio, c_out);
    if (*re) return run_reference(f_bench, f_inst, f_mesh, f_T, f_ratio, f_out, f_record, f_every);
    if (*bc) return run_bench_cost(b_model, b_inst, b_bench, b_meshes, b_T, b_repeat, b_out);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const StepDiverged& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const NonPhysicalState& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const TrainingAborted& e) {
    std::cerr << "training aborted: " << e.what() << '\n';
    return kAborted;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
