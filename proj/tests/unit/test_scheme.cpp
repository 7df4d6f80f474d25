#include <cmath>
#include <filesystem>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "hyperweno/autodiff/gradcheck.hpp"
#include "hyperweno/diff.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/scheme.hpp"
#include "support.hpp"

using namespace hyperweno;
using scheme::Model;
using scheme::SchemeKind;

namespace {

const SchemeKind kAllKinds[] = {SchemeKind::Classical, SchemeKind::Linear, SchemeKind::HyperCfcnn,
                                SchemeKind::HyperCfcnnF};

networks::HyperNetConfig small_hyper() {
  networks::HyperNetConfig h;
  h.layers = 3;
  h.channels = 8;
  return h;
}

Field smooth_state(const physics::SystemSpec& sys, const Grid& g) {
  Field u(g.n_cells, sys.n_components());
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    const double x = g.x_mid[i];
    switch (sys.kind) {
      case physics::SystemKind::Burgers:
        u(i, 0) = 0.3 + std::sin(x);
        break;
      case physics::SystemKind::ShallowWater:
        u(i, 0) = 1.0 + 0.2 * std::sin(x);
        u(i, 1) = 0.1 * std::cos(x);
        break;
      case physics::SystemKind::Euler: {
        const double rho = 1.0 + 0.2 * std::sin(x), v = 0.3, p = 1.0 + 0.1 * std::cos(x);
        u(i, 0) = rho;
        u(i, 1) = rho * v;
        u(i, 2) = p / (sys.gamma - 1.0) + 0.5 * rho * v * v;
        break;
      }
    }
  }
  return u;
}

// Random final layers so learned weights and fluxes are not at their
// neutral initial values.
void perturb_final_layers(Model& m, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  if (m.learned_weights())
    for (double& v : m.params.at(networks::weight_name(networks::kHyperPrefix, m.hyper.layers - 1)).data) v = d(rng);
  if (m.learned_flux()) {
    for (double& v : m.params.at(networks::weight_name(networks::kFluxPrefix, m.flux.layers - 1)).data) v = d(rng);
    // Keep the learned flux close to Rusanov-sized values without dominating.
  }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("scheme names") {
  for (SchemeKind k : kAllKinds) CHECK(scheme::parse_scheme_kind(scheme::to_string(k)) == k);
  CHECK(scheme::parse_scheme_kind("weno5") == SchemeKind::Classical);
  CHECK_THROWS_AS(scheme::parse_scheme_kind("weno7"), InvalidArgument);
}

TEST_CASE("model shapes and trainable names") {
  const Model c = scheme::make_model(SchemeKind::Classical, physics::SystemSpec::burgers(), 1);
  CHECK(c.trainable_names().empty());
  const Model h = scheme::make_model(SchemeKind::HyperCfcnn, physics::SystemSpec::euler(), 1);
  CHECK(h.hyper.target.n_components == 3);
  CHECK(h.hyper.in_channels() == 5);
  CHECK(h.trainable_names().size() == 12);
  const Model f = scheme::make_model(SchemeKind::HyperCfcnnF, physics::SystemSpec::euler(), 1);
  CHECK(f.flux.kernel == 1);
  CHECK(f.trainable_names().size() == 20);
  const Model fb = scheme::make_model(SchemeKind::HyperCfcnnF, physics::SystemSpec::burgers(), 1);
  CHECK(fb.flux.kernel == 5);
}

TEST_CASE("untrained Hyper-CFCNN reproduces the linear scheme") {
  const auto sys = physics::SystemSpec::burgers();
  const Grid g = make_grid(0.0, 2.0 * testing_support::kPi, 64);
  const State s0{smooth_state(sys, g), 0.0};
  const Model lin = scheme::make_model(SchemeKind::Linear, sys, 0);
  const Model hyp = scheme::make_model(SchemeKind::HyperCfcnn, sys, 123);
  const auto a = scheme::run_rollout(lin, g, BoundaryCondition::Periodic, s0, 50, 0.02);
  const auto b = scheme::run_rollout(hyp, g, BoundaryCondition::Periodic, s0, 50, 0.02);
  REQUIRE_FALSE(a.diverged);
  REQUIRE_FALSE(b.diverged);
  CHECK(max_abs_diff(a.snapshots.back().u.values(), b.snapshots.back().u.values()) <= 1e-12);
}

TEST_CASE("hypernetwork runs once per rollout") {
  const auto sys = physics::SystemSpec::burgers();
  const Grid g = make_grid(0.0, 1.0, 32);
  Model m = scheme::make_model(SchemeKind::HyperCfcnn, sys, 3, small_hyper());
  const State s0{testing_support::random_field(32, 1, 4, 0.2, 0.8), 0.0};
  const auto before = networks::hypernet_evaluations();
  const auto r = scheme::run_rollout(m, g, BoundaryCondition::Periodic, s0, 20, 0.005);
  CHECK_FALSE(r.diverged);
  CHECK(networks::hypernet_evaluations() - before == 1);
}

TEST_CASE("model persistence reproduces rollouts bitwise") {
  const auto sys = physics::SystemSpec::shallow_water(1.0);
  Model m = scheme::make_model(SchemeKind::HyperCfcnnF, sys, 9, small_hyper());
  perturb_final_layers(m, 10, 0.05);
  const auto path = std::filesystem::temp_directory_path() / "hyperweno_model_test.bin";
  scheme::save_model(path, m);
  const Model back = scheme::load_model(path);
  std::filesystem::remove(path);
  CHECK(back.kind == m.kind);
  CHECK(back.system.kind == sys.kind);
  CHECK(back.hyper.layers == 3);
  CHECK(back.hyper.channels == 8);
  CHECK(back.params == m.params);
  const Grid g = make_grid(0.0, 2.0 * testing_support::kPi, 32);
  const State s0{smooth_state(sys, g), 0.0};
  const auto a = scheme::run_rollout(m, g, BoundaryCondition::Periodic, s0, 10, 0.01);
  const auto b = scheme::run_rollout(back, g, BoundaryCondition::Periodic, s0, 10, 0.01);
  CHECK(a.snapshots.back().u == b.snapshots.back().u);

  ad::ParameterStore broken = scheme::model_to_store(m);
  broken.erase("meta.scheme");
  CHECK_THROWS_AS(scheme::model_from_store(broken), FormatError);
}

TEST_CASE("tape solver matches the fast solver for every kind and system") {
  const physics::SystemSpec systems[] = {physics::SystemSpec::burgers(), physics::SystemSpec::shallow_water(1.0),
                                         physics::SystemSpec::euler(1.4)};
  for (const auto& sys : systems) {
    for (SchemeKind kind : kAllKinds) {
      for (auto bc : {BoundaryCondition::Periodic, BoundaryCondition::NoFlux}) {
        CAPTURE(scheme::to_string(kind));
        CAPTURE(physics::to_string(sys.kind));
        CAPTURE(to_string(bc));
        Model m = scheme::make_model(kind, sys, 17, small_hyper());
        perturb_final_layers(m, 18, 0.05);
        const Grid g = make_grid(0.0, 2.0 * testing_support::kPi, 24);
        const Field u0 = smooth_state(sys, g);
        const scheme::Instance inst(m, g, bc, u0);
        const auto fast = inst.rhs(u0);
        const auto step = stepper::ssp_rk3_step(u0, 0.01, inst.op());

        ad::Tape tape;
        ad::BoundParameters bp(tape, m.params, m.trainable_names(), true);
        const Field meta = networks::build_metadata(g, u0);
        const diff::Solver solver(m, m.learned_weights() || m.learned_flux() ? &bp : nullptr, g, bc,
                                  tape.constant(ad::Tensor(ad::Shape{g.n_cells, meta.cols()}, meta.values())));
        ad::Var u = tape.constant(ad::Tensor(ad::Shape{g.n_cells, u0.cols()}, u0.values()));
        const auto slow = solver.rhs(u);
        const double scale = std::max(1.0, max_abs(fast.dudt.values()));
        CHECK(max_abs_diff(slow.dudt.value().data, fast.dudt.values()) <= 1e-13 * scale);
        CHECK(max_abs_diff(slow.f_hat.value().data, fast.f_hat.values()) <= 1e-13 * scale);
        const ad::Var u1 = solver.step(u, 0.01);
        CHECK(max_abs_diff(u1.value().data, step.u.values()) <= 1e-13 * std::max(1.0, max_abs(step.u.values())));
      }
    }
  }
}

TEST_CASE("learned weights form a convex combination") {
  Model m = scheme::make_model(SchemeKind::HyperCfcnn, physics::SystemSpec::burgers(), 5, small_hyper());
  perturb_final_layers(m, 6, 1.0);
  const Grid g = make_grid(0.0, 1.0, 40);
  const Field u0 = testing_support::random_field(40, 1, 7, -1.0, 1.0);
  const scheme::Instance inst(m, g, BoundaryCondition::NoFlux, u0);
  const scheme::LearnedWeights lw(*inst.target());
  const Field padded = pad_ghost(u0, BoundaryCondition::NoFlux, weno::kGhostWidth);
  physics::RhsContext ctx{g, BoundaryCondition::NoFlux, u0, padded};
  const weno::WenoWeights w = lw.weights(ctx);
  bool varied = false;
  for (std::size_t j = 0; j <= 40; ++j) {
    double sm = 0.0, sp = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(w.rows.minus[3 * j + k] > 0.0);
      CHECK(w.rows.plus[3 * j + k] > 0.0);
      sm += w.rows.minus[3 * j + k];
      sp += w.rows.plus[3 * j + k];
      varied = varied || std::abs(w.rows.minus[3 * j + k] - weno::kLinearWeightsMinus[k]) > 1e-3;
    }
    CHECK(std::abs(sm - 1.0) <= 1e-15);
    CHECK(std::abs(sp - 1.0) <= 1e-15);
  }
  CHECK(varied);
}

TEST_CASE("periodic learned schemes are translation-equivariant") {
  for (SchemeKind kind : {SchemeKind::HyperCfcnn, SchemeKind::HyperCfcnnF}) {
    Model m = scheme::make_model(kind, physics::SystemSpec::burgers(), 21, small_hyper());
    perturb_final_layers(m, 22, 0.1);
    const std::size_t n = 32, s = 5;
    const Grid g = make_grid(0.0, 1.0, n);
    const Field u0 = testing_support::random_field(n, 1, 23, 0.1, 0.9);
    Field shifted(n, 1);
    for (std::size_t i = 0; i < n; ++i) shifted(i, 0) = u0((i + s) % n, 0);
    // The centre metadata channel is not shift-invariant, so compare on
    // instances whose metadata is shifted consistently: rebuild the rhs
    // from shifted target parameters instead.
    const scheme::Instance a(m, g, BoundaryCondition::Periodic, u0);
    networks::TargetNetParams tp = *a.target();
    networks::TargetNetParams shifted_tp = tp;
    const auto roll = [&](const std::vector<double>& v, std::vector<double>& out) {
      const std::size_t w = v.size() / n;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < w; ++c) out[i * w + c] = v[((i + s) % n) * w + c];
    };
    roll(tp.w1, shifted_tp.w1);
    roll(tp.b1, shifted_tp.b1);
    roll(tp.w2, shifted_tp.w2);
    roll(tp.b2, shifted_tp.b2);
    const scheme::LearnedWeights wa(tp), wb(shifted_tp);
    const auto flux = kind == SchemeKind::HyperCfcnnF
                          ? std::unique_ptr<physics::FluxProvider>(new scheme::FluxNetFlux(m.flux, m.params))
                          : std::unique_ptr<physics::FluxProvider>(new physics::RusanovFlux(m.system));
    const auto ra = physics::semi_discrete_rhs(g, BoundaryCondition::Periodic, u0, wa, *flux);
    const auto rb = physics::semi_discrete_rhs(g, BoundaryCondition::Periodic, shifted, wb, *flux);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rb.dudt(i, 0) - ra.dudt((i + s) % n, 0)) <= 1e-12);
  }
}

TEST_CASE("learned flux conserves mass up to the logged boundary fluxes") {
  Model m = scheme::make_model(SchemeKind::HyperCfcnnF, physics::SystemSpec::burgers(), 31, small_hyper());
  perturb_final_layers(m, 32, 0.1);
  const Grid g = make_grid(0.0, 1.0, 32);
  const State s0{testing_support::random_field(32, 1, 33, 0.2, 0.8), 0.0};
  const auto r = scheme::run_rollout(m, g, BoundaryCondition::NoFlux, s0, 40, 0.004);
  REQUIRE_FALSE(r.diverged);
  for (double c : stepper::conservation_remainder(r, 0)) CHECK(std::abs(c) <= 1e-13);
}

TEST_CASE("full step gradient with respect to every hypernetwork parameter") {
  const auto sys = physics::SystemSpec::burgers();
  Model m = scheme::make_model(SchemeKind::HyperCfcnn, sys, 41, small_hyper());
  perturb_final_layers(m, 42, 0.2);
  const Grid g = make_grid(0.0, 2.0 * testing_support::kPi, 16);
  const Field u0 = testing_support::random_field(16, 1, 43, -1.0, 1.0);
  const Field meta = networks::build_metadata(g, u0);
  const double dt = 0.05;
  const auto names = m.trainable_names();
  // Training-shaped objective: squared distance to a classical WENO5 step.
  const Model classical = scheme::make_model(SchemeKind::Classical, sys, 0);
  const Field ref = stepper::ssp_rk3_step(u0, dt, scheme::Instance(classical, g, BoundaryCondition::Periodic, u0).op()).u;

  ad::Tape tape;
  ad::BoundParameters bp(tape, m.params, names, true);
  const diff::Solver solver(m, &bp, g, BoundaryCondition::Periodic,
                            tape.constant(ad::Tensor(ad::Shape{16, meta.cols()}, meta.values())));
  const ad::Var u1 = solver.step(tape.constant(ad::Tensor(ad::Shape{16, 1}, u0.values())), dt);
  const ad::Var r = tape.constant(ad::Tensor(ad::Shape{16, 1}, ref.values()));
  tape.backward(ad::scale(ad::reduce_sum(ad::square(ad::sub(u1, r))), g.dx));
  ad::Gradients grads;
  bp.accumulate_grads(grads);
  std::vector<double> analytic;
  for (const auto& n : names) analytic.insert(analytic.end(), grads.at(n).begin(), grads.at(n).end());

  const std::vector<double> x0 = m.params.flatten(names);
  auto f = [&](const std::vector<double>& x) {
    Model mm = m;
    mm.params.unflatten(names, x);
    const scheme::Instance inst(mm, g, BoundaryCondition::Periodic, u0);
    const auto r = stepper::ssp_rk3_step(u0, dt, inst.op());
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i) s += (r.u(i, 0) - ref(i, 0)) * (r.u(i, 0) - ref(i, 0));
    return s * g.dx;
  };
  const auto res = ad::check_gradient(f, x0, analytic, 1e-5, 1e-8);
  CHECK(res.n_checked > x0.size() / 2);
  CHECK(res.max_rel_error < 1e-4);
  MESSAGE("max rel error " << res.max_rel_error << " over " << res.n_checked << " parameters");
}
