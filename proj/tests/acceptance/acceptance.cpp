// Acceptance checks: one PASS/FAIL line per criterion.
//
// Exit status is 0 once every check has been evaluated (the verdicts are in
// the output); --strict makes any FAIL a nonzero exit. --only <name> runs a
// single check.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "hyperweno/autodiff/gradcheck.hpp"
#include "hyperweno/benchmarks.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/training.hpp"

using namespace hyperweno;
using scheme::Model;
using scheme::SchemeKind;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

double max_remainder(const stepper::RolloutRecord& rec, std::size_t component) {
  double m = 0.0;
  for (double c : stepper::conservation_remainder(rec, component)) m = std::max(m, c);
  return m;
}

double max_abs_total(const stepper::RolloutRecord& rec, std::size_t component) {
  double m = 0.0;
  for (const auto& s : rec.snapshots) m = std::max(m, std::abs(total(s.u, component, rec.grid.dx)));
  return m;
}

void perturb_final(Model& m, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  if (m.learned_weights())
    for (double& v : m.params.at(networks::weight_name(networks::kHyperPrefix, m.hyper.layers - 1)).data) v = d(rng);
  if (m.learned_flux())
    for (double& v : m.params.at(networks::weight_name(networks::kFluxPrefix, m.flux.layers - 1)).data) v = d(rng);
}

// Burgers u0 = sin x before the shock: x = xi + t sin xi along characteristics,
// and int u dx = [-cos xi + (t/2) sin^2 xi], so cell averages are exact.
double characteristic_foot(double x, double t) {
  double xi = x;
  for (int k = 0; k < 100; ++k) {
    const double step = (xi + t * std::sin(xi) - x) / (1.0 + t * std::cos(xi));
    xi -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return xi;
}

double sine_burgers_average(double a, double b, double t) {
  auto prim = [t](double xi) { return -std::cos(xi) + 0.5 * t * std::sin(xi) * std::sin(xi); };
  return (prim(characteristic_foot(b, t)) - prim(characteristic_foot(a, t))) / (b - a);
}

// ---------------------------------------------------------------- checks

Outcome smooth_order() {
  auto inst = benchmarks::load_benchmark("burgers1").test_instance();
  inst.params = {0.0, 1.0};
  const Model classical = scheme::make_model(SchemeKind::Classical, inst.system, 0);
  const double T = 0.5;
  std::vector<double> mse;
  std::ostringstream os;
  for (std::size_t n : {32u, 64u, 128u}) {
    const Grid g = make_grid(inst.x_lo, inst.x_hi, n);
    // Time error O(dt^3) kept below the spatial O(dx^5): dt = 0.4 dx^(5/3).
    const auto sched = stepper::schedule(T, g.dx, 0.4 * std::pow(g.dx, 2.0 / 3.0));
    const auto rec = scheme::run_rollout(classical, g, inst.bc, benchmarks::instantiate_ic(inst, g), sched.n_steps,
                                         sched.dt);
    if (rec.diverged) return {false, "N=" + std::to_string(n) + " diverged"};
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = rec.snapshots.back().u(j, 0) - sine_burgers_average(g.interface_x(j), g.interface_x(j + 1), T);
      s += e * e;
    }
    mse.push_back(s / static_cast<double>(n));
  }
  bool ok = true;
  os << "L2 orders";
  for (std::size_t k = 1; k < mse.size(); ++k) {
    const double p = stepper::refinement_order(mse[k - 1], mse[k]);
    ok = ok && p >= 4.0;
    os << " " << fmt(p);
  }
  os << " (N 32/64/128 vs exact averages, need >= 4.0 each)";
  return {ok, os.str()};
}

Outcome conservation_known_flux() {
  const auto bench = benchmarks::load_benchmark("burgers1");
  const auto inst = bench.test_instance();
  double worst = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    Model m = scheme::make_model(SchemeKind::HyperCfcnn, inst.system, 1);
    if (variant == 1) perturb_final(m, 2, 0.05);  // an arbitrary training state
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
      const auto rec = benchmarks::run_instance(m, inst, n, 3.0);
      if (rec.diverged) return {false, "N=" + std::to_string(n) + " diverged: " + rec.error};
      worst = std::max(worst, max_remainder(rec, 0) / max_abs_total(rec, 0));
    }
  }
  return {worst <= 1e-12, "max relative C(u) " + fmt(worst) + " (untrained + perturbed, N 32..256, T=3)"};
}

Outcome conservation_learned_flux() {
  const auto bench = benchmarks::load_benchmark("burgers1");
  const auto inst = bench.test_instance();
  double worst = 0.0;
  std::size_t runs = 0;
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    Model m = scheme::make_model(SchemeKind::HyperCfcnnF, inst.system, seed);
    perturb_final(m, seed + 10, 0.05);
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
      const auto rec = benchmarks::run_instance(m, inst, n, 3.0);
      // A diverged run still has to conserve up to the step where it stopped.
      if (rec.snapshots.size() < 2) continue;
      worst = std::max(worst, max_remainder(rec, 0) / max_abs_total(rec, 0));
      ++runs;
    }
  }
  return {runs > 0 && worst <= 1e-12,
          "max relative C(u) " + fmt(worst) + " over " + std::to_string(runs) + " random FluxNet runs"};
}

Outcome keystone_gradient() {
  training::GenerateConfig gc;
  gc.levels = {16};
  gc.final_time = 1.2;
  gc.n_traj = 1;
  gc.seed = 1;
  const auto ds = training::generate_dataset(benchmarks::load_benchmark("burgers1"), gc);
  const auto w = training::make_window(ds, 0, 0, 4, 2);
  Model m = scheme::make_model(SchemeKind::HyperCfcnn, ds.system, 7);
  // With the zero-initialized final layer every upstream gradient is exactly
  // zero; a random final layer makes all of them live.
  perturb_final(m, 8, 0.05);
  const auto names = m.trainable_names();
  const auto bg = training::batch_gradient(m, {&w}, 2, ds.bc);
  if (bg.valid != 1) return {false, "window invalid"};
  std::vector<double> analytic;
  for (const auto& n : names) analytic.insert(analytic.end(), bg.grads.at(n).begin(), bg.grads.at(n).end());
  const auto x0 = m.params.flatten(names);
  Model probe = m;
  auto f = [&](const std::vector<double>& x) {
    probe.params.unflatten(names, x);
    return training::window_loss(probe, w, 2, ds.bc);
  };
  const auto r = ad::check_gradient(f, x0, analytic, 1e-5, 1e-8);
  return {r.max_rel_error < 1e-4, "max rel error " + fmt(r.max_rel_error) + " over " + std::to_string(r.n_checked) +
                                      " of " + std::to_string(x0.size()) + " parameters above 1e-8 (N=16, K=2)"};
}

Outcome init_neutrality() {
  const auto inst = benchmarks::load_benchmark("burgers1").test_instance();
  const Model hyper = scheme::make_model(SchemeKind::HyperCfcnn, inst.system, 11);
  const Model linear = scheme::make_model(SchemeKind::Linear, inst.system, 0);
  double worst = 0.0;
  for (std::size_t n : {64u, 256u}) {
    const Grid g = make_grid(inst.x_lo, inst.x_hi, n);
    const State s0 = benchmarks::instantiate_ic(inst, g);
    const double dt = 0.4 * g.dx;
    const auto a = scheme::run_rollout(hyper, g, inst.bc, s0, 50, dt);
    const auto b = scheme::run_rollout(linear, g, inst.bc, s0, 50, dt);
    if (a.diverged || b.diverged || a.snapshots.size() != 51) return {false, "rollout diverged"};
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(a.snapshots[k].u(j, 0) - b.snapshots[k].u(j, 0)));
  }
  return {worst <= 1e-12, "max |u_hyper - u_linear| " + fmt(worst) + " over 50 steps (N 64, 256)"};
}

Outcome order_arithmetic() {
  const double mses[4] = {1.2034e-2, 5.5819e-3, 1.5290e-3, 2.9309e-4};
  const double expect[3] = {0.55, 0.93, 1.19};
  std::vector<Field> pred, ref;
  for (double v : mses) {
    pred.push_back(Field(1, 1, std::sqrt(v)));
    ref.push_back(Field(1, 1, 0.0));
  }
  const auto d = stepper::mse_and_order(pred, ref);
  bool ok = true;
  std::ostringstream os;
  os << "orders";
  for (std::size_t k = 1; k < 4; ++k) {
    ok = ok && std::abs(d.order[k] - expect[k - 1]) <= 0.01;
    os << " " << fmt(d.order[k], 4);
  }
  return {ok, os.str() + " (table: 0.55 0.93 1.19)"};
}

Outcome desk_training() {
  const auto bench = benchmarks::load_benchmark("burgers1");
  training::GenerateConfig gc;
  gc.levels = {32, 64};
  gc.final_time = bench.train_time;
  gc.n_traj = 20;
  const auto ds = training::generate_dataset(bench, gc);
  Model m = scheme::make_model(SchemeKind::HyperCfcnn, ds.system, 0);
  training::TrainConfig tc;
  tc.window = 20;
  tc.unroll = 4;
  tc.epochs = 100;
  const double before = training::dataset_loss(m, ds, tc.window, tc.unroll);
  training::train(m, ds, tc);
  const double after = training::dataset_loss(m, ds, tc.window, tc.unroll);
  const bool fell = after <= 0.5 * before;

  const auto rows = benchmarks::convergence_study(m, bench.test_instance(), {32, 64, 128}, 1.5, bench.reference_mesh);
  bool monotone = true;
  std::ostringstream os;
  os << "(a) trajectory loss " << fmt(before) << " -> " << fmt(after) << " (x" << fmt(after / before) << ")"
     << "; (b) MSE at T=1.5";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    os << " N" << rows[k].n_cells << "=" << fmt(rows[k].mse);
    monotone = monotone && !rows[k].diverged && (k == 0 || rows[k].mse < rows[k - 1].mse);
  }
  // Context only: the classical scheme on the same instance and meshes.
  const Model classical = scheme::make_model(SchemeKind::Classical, ds.system, 0);
  os << "; classical";
  for (const auto& r : benchmarks::convergence_study(classical, bench.test_instance(), {32, 64, 128}, 1.5,
                                                     bench.reference_mesh))
    os << " N" << r.n_cells << "=" << fmt(r.mse);
  return {fell && monotone, os.str()};
}

Outcome param_linearity() {
  const Model m = scheme::make_model(SchemeKind::HyperCfcnn, physics::SystemSpec::burgers(), 0);
  const std::size_t p_cell = m.hyper.target.p_cell();
  bool ok = p_cell == 78;
  std::ostringstream os;
  os << "P_cell " << p_cell << ";";
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    const Grid g = make_grid(0.0, 2.0 * std::numbers::pi, n);
    const scheme::Instance inst(m, g, BoundaryCondition::Periodic, Field(n, 1, 0.5));
    const std::size_t got = inst.target()->total();
    ok = ok && got == n * p_cell;
    os << " N" << n << "=" << got;
  }
  return {ok, os.str()};
}

Outcome euler_shu_osher() {
  const auto bench = benchmarks::load_benchmark("euler");
  auto inst = bench.test_instance();
  inst.params = {3.857135, 2.629369, 10.33333, 1.0, 0.2, -4.0, 3.29867};
  inst.extrapolation = false;
  const Model classical = scheme::make_model(SchemeKind::Classical, inst.system, 0);
  const auto rec = benchmarks::run_instance(classical, inst, 512, 1.6, bench.step_ratio);
  if (rec.diverged) return {false, "diverged: " + rec.error};
  const double gamma = inst.system.gamma;
  double min_rho = 1e300, min_p = 1e300;
  bool finite = true;
  for (const auto& s : rec.snapshots) {
    for (std::size_t j = 0; j < s.u.rows(); ++j) {
      const double rho = s.u(j, 0), mom = s.u(j, 1), e = s.u(j, 2);
      const double p = (gamma - 1.0) * (e - 0.5 * mom * mom / rho);
      finite = finite && std::isfinite(rho) && std::isfinite(mom) && std::isfinite(e);
      min_rho = std::min(min_rho, rho);
      min_p = std::min(min_p, p);
    }
  }
  const Field& u = rec.snapshots.back().u;
  const Grid& g = rec.grid;
  const std::size_t n = g.n_cells;
  // Leading shock: the right-most density jump above 0.5.
  std::size_t js = 0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (u(j, 0) - u(j + 1, 0) > 0.5) js = j;
  const double xs = g.interface_x(js + 1);
  // Mach 3 shock into (rho, p) = (1, 1): speed 3 sqrt(1.4).
  const double xs_expect = -4.0 + 3.0 * std::sqrt(gamma) * 1.6;
  // Downstream (behind the shock): count density maxima in (xs - 2, xs - 0.1).
  std::size_t peaks = 0;
  double lo = 1e300, hi = -1e300;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double x = g.x_mid[j];
    if (x <= xs - 2.0 || x >= xs - 0.1) continue;
    lo = std::min(lo, u(j, 0));
    hi = std::max(hi, u(j, 0));
    if (u(j, 0) > u(j - 1, 0) && u(j, 0) >= u(j + 1, 0)) ++peaks;
  }
  // Upstream is at rest with uniform pressure: density keeps its initial profile.
  double upstream = 0.0;
  const Field& u0 = rec.snapshots.front().u;
  for (std::size_t j = 0; j < n; ++j)
    if (g.x_mid[j] > xs + 0.2) upstream = std::max(upstream, std::abs(u(j, 0) - u0(j, 0)));

  const bool positive = finite && min_rho > 0.0 && min_p > 0.0;
  const bool shock_ok = std::abs(xs - xs_expect) < 0.15;
  const bool oscillatory = peaks >= 3 && hi - lo > 0.2;
  std::ostringstream os;
  os << "min rho " << fmt(min_rho) << ", min p " << fmt(min_p) << "; shock at x=" << fmt(xs) << " (Mach 3 estimate "
     << fmt(xs_expect) << "); " << peaks << " density maxima, range " << fmt(hi - lo)
     << " behind the shock; upstream drift " << fmt(upstream);
  return {positive && shock_ok && oscillatory && upstream < 1e-3, os.str()};
}

Outcome shallow_noflux() {
  const auto bench = benchmarks::load_benchmark("shallow");
  const auto inst = bench.test_instance();
  std::ostringstream os;
  bool ok = true;
  double worst_rel = 0.0;
  for (SchemeKind kind : {SchemeKind::Classical, SchemeKind::HyperCfcnn}) {
    const Model m = scheme::make_model(kind, inst.system, 0);
    double prev[2] = {1e300, 1e300};
    os << scheme::to_string(kind) << ":";
    for (std::size_t n : {64u, 128u, 256u}) {
      const auto rec = benchmarks::run_instance(m, inst, n, 1.0);
      if (rec.diverged) return {false, "N=" + std::to_string(n) + " diverged"};
      os << " N" << n;
      for (std::size_t c = 0; c < 2; ++c) {
        const double v = max_remainder(rec, c);
        worst_rel = std::max(worst_rel, v / std::max(max_abs_total(rec, c), 1.0));
        ok = ok && std::isfinite(v) && v < prev[c];
        prev[c] = v;
        os << (c == 0 ? " C(h)=" : " C(hv)=") << fmt(v);
      }
    }
    os << "; ";
  }
  os << "max over t <= 1";
  // The logged flux makes C exact up to round-off, where it cannot decrease.
  if (worst_rel < 1e-12) os << "; all at the round-off floor (max relative " << fmt(worst_rel) << ")";
  return {ok, os.str()};
}

struct Check {
  const char* name;
  double budget_seconds;
  Outcome (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--strict] [--only <name>]\n";
      return 2;
    }
  }
  const Check checks[] = {
      {"classical-weno5-order", 30, smooth_order},
      {"conservation-known-flux-periodic", 60, conservation_known_flux},
      {"conservation-learned-flux", 30, conservation_learned_flux},
      {"gradient-keystone", 300, keystone_gradient},
      {"initialization-neutrality", 10, init_neutrality},
      {"refinement-order-arithmetic", 1, order_arithmetic},
      {"desk-scale-training", 1800, desk_training},
      {"parameter-count-linearity", 10, param_linearity},
      {"euler-shu-osher-reference", 300, euler_shu_osher},
      {"shallow-water-noflux-conservation", 120, shallow_noflux},
  };
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!only.empty() && only != c.name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt(secs) << " s, budget "
              << c.budget_seconds << " s" << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  return strict && failed > 0 ? 1 : 0;
}
