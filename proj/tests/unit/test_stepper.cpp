#include <cmath>

#include "doctest.h"
#include "hyperweno/error.hpp"
#include "hyperweno/stepper.hpp"
#include "support.hpp"

using namespace hyperweno;
using namespace hyperweno::stepper;
using testing_support::kPi;

namespace {

RhsOperator classical_burgers(const Grid& g, BoundaryCondition bc) {
  return [g, bc](const Field& u) {
    return physics::semi_discrete_rhs(g, bc, u, physics::ClassicalWeights{},
                                      physics::RusanovFlux{physics::SystemSpec::burgers()});
  };
}

// u' = lambda u as a one-cell "rhs".
RhsOperator linear_ode(double lambda) {
  return [lambda](const Field& u) {
    physics::RhsResult r{Field(1, 1), Field(2, 1)};
    r.dudt(0, 0) = lambda * u(0, 0);
    return r;
  };
}

}  // namespace

TEST_CASE("zero rhs leaves the state unchanged") {
  const Field u = testing_support::random_field(10, 2, 1);
  const StepResult s = ssp_rk3_step(u, 0.1, [](const Field& v) {
    return physics::RhsResult{Field(v.rows(), v.cols()), Field(v.rows() + 1, v.cols())};
  });
  // u/3 + 2/3 u rounds, so "unchanged" means to the last couple of ulps.
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(s.u.values()[i] - u.values()[i]) <= 4e-16);
  CHECK_THROWS_AS(ssp_rk3_step(u, 0.0, linear_ode(1.0)), InvalidArgument);
}

TEST_CASE("amplification factor of the three-stage scheme") {
  const double z = -0.1;
  const StepResult s = ssp_rk3_step(Field(1, 1, 1.0), 0.1, linear_ode(-1.0));
  CHECK(std::abs(s.u(0, 0) - (1 + z + z * z / 2 + z * z * z / 6)) <= 1e-12);
  // Third-order truncation of exp(-0.1) = 0.904837418...
  CHECK(std::abs(s.u(0, 0) - std::exp(z)) < 5e-6);
}

TEST_CASE("divergence guard") {
  CHECK_THROWS_AS(ssp_rk3_step(Field(1, 1, 1.0), 1.0, linear_ode(1e9)), StepDiverged);
  CHECK_THROWS_AS(check_divergence(Field(1, 1, std::nan(""))), StepDiverged);
  const Grid g = make_grid(0, 1, 8);
  // Growth factor 1 + 10 + 50 + 500/3 per step: |u| passes 1e8 during step 4.
  const RolloutRecord r = rollout(g, BoundaryCondition::Periodic, {Field(1, 1, 1.0), 0.0}, 10, 1.0, linear_ode(10.0));
  CHECK(r.diverged);
  CHECK_FALSE(r.error.empty());
  CHECK(r.snapshots.size() == 4);
  CHECK(r.n_steps() == 3);
}

TEST_CASE("one periodic Burgers step conserves mass") {
  const Grid g = make_grid(0.0, 2.0 * kPi, 64);
  Field u = testing_support::sine_averages(g);
  for (double& v : u.values()) v += 0.5;
  const StepResult s = ssp_rk3_step(u, 0.4 * g.dx, classical_burgers(g, BoundaryCondition::Periodic));
  const double before = total(u, 0, g.dx), after = total(s.u, 0, g.dx);
  CHECK(std::abs(after - before) <= 1e-13 * std::abs(before));
}

TEST_CASE("rollout bookkeeping and exact telescoping with effective fluxes") {
  const Grid g = make_grid(-1.0, 1.0, 40);
  Field u(40, 1);
  for (std::size_t i = 0; i < 40; ++i) u(i, 0) = g.x_mid[i] < 0.0 ? 1.0 : -0.5;
  const RolloutRecord r0 = rollout(g, BoundaryCondition::NoFlux, {u, 0.0}, 0, 0.01, classical_burgers(g, BoundaryCondition::NoFlux));
  CHECK(r0.snapshots.size() == 1);
  CHECK(conservation_remainder(r0, 0) == std::vector<double>{0.0});

  const double dt = 0.4 * g.dx;
  const RolloutRecord r = rollout(g, BoundaryCondition::NoFlux, {u, 0.0}, 30, dt, classical_burgers(g, BoundaryCondition::NoFlux));
  REQUIRE(r.snapshots.size() == 31);
  CHECK(r.n_steps() == 30);
  CHECK(r.snapshots.back().t == doctest::Approx(30 * dt));
  const auto c = conservation_remainder(r, 0);
  for (double v : c) CHECK(v <= 1e-13);

  // Per-cell telescoping: the update equals -dt/dx times the difference of the
  // stage-weighted fluxes. Recompute the three stage fluxes for one step.
  const auto op = classical_burgers(g, BoundaryCondition::NoFlux);
  const Field& un = r.snapshots[5].u;
  const physics::RhsResult a = op(un);
  Field u1 = un;
  for (std::size_t i = 0; i < 40; ++i) u1(i, 0) += dt * a.dudt(i, 0);
  const physics::RhsResult b = op(u1);
  Field u2 = un;
  for (std::size_t i = 0; i < 40; ++i) u2(i, 0) = 0.75 * un(i, 0) + 0.25 * (u1(i, 0) + dt * b.dudt(i, 0));
  const physics::RhsResult c3 = op(u2);
  for (std::size_t i = 0; i < 40; ++i) {
    auto feff = [&](std::size_t j) { return a.f_hat(j, 0) / 6 + b.f_hat(j, 0) / 6 + 2.0 / 3.0 * c3.f_hat(j, 0); };
    const double expect = -(dt / g.dx) * (feff(i + 1) - feff(i));
    CHECK(std::abs((r.snapshots[6].u(i, 0) - un(i, 0)) - expect) <= 1e-13);
  }
}

TEST_CASE("odd symmetry is preserved by the classical scheme") {
  const Grid g = make_grid(-kPi, kPi, 64);
  Field u(64, 1);
  for (std::size_t i = 0; i < 64; ++i) {
    const double a = g.interface_x(i), b = g.interface_x(i + 1);
    u(i, 0) = (std::cos(a) - std::cos(b)) / g.dx;  // odd about 0
  }
  const RolloutRecord r = rollout(g, BoundaryCondition::Periodic, {u, 0.0}, 10, 0.4 * g.dx,
                                  classical_burgers(g, BoundaryCondition::Periodic));
  const Field& v = r.snapshots.back().u;
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(v(i, 0) + v(63 - i, 0)) <= 1e-10);
}

TEST_CASE("schedule lands exactly on T") {
  const StepSchedule s = schedule(1.5, 2.0 * kPi / 512, 0.4);
  CHECK(s.n_steps == static_cast<std::size_t>(std::ceil(1.5 / (0.4 * 2.0 * kPi / 512))));
  CHECK(s.dt * s.n_steps == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(s.dt <= 0.4 * 2.0 * kPi / 512);
  CHECK(schedule(0.0, 0.1, 0.4).n_steps == 0);
  CHECK_THROWS_AS(schedule(1.0, 0.1, 0.0), InvalidArgument);
}

TEST_CASE("mse and refinement order reproduce the published rates") {
  CHECK(mean_squared_error(Field(4, 1, 0.3), Field(4, 1, 0.3)) == 0.0);
  CHECK_THROWS_AS(mean_squared_error(Field(4, 1), Field(5, 1)), ShapeError);
  CHECK(refinement_order(1.2034e-2, 5.5819e-3) == doctest::Approx(0.55).epsilon(0.01 / 0.55));
  CHECK(std::abs(refinement_order(5.473e-4, 1.830e-4) - 0.79) <= 0.01);

  const double mses[4] = {1.2034e-2, 5.5819e-3, 1.5290e-3, 2.9309e-4};
  std::vector<Field> pred, ref;
  for (std::size_t k = 0; k < 4; ++k) {
    pred.push_back(Field(1, 1, std::sqrt(mses[k])));
    ref.push_back(Field(1, 1, 0.0));
  }
  const Diagnostics d = mse_and_order(pred, ref);
  CHECK(std::isnan(d.order[0]));
  CHECK(std::abs(d.order[1] - 0.55) <= 0.01);
  CHECK(std::abs(d.order[2] - 0.93) <= 0.01);
  CHECK(std::abs(d.order[3] - 1.19) <= 0.01);
  for (std::size_t k = 0; k < 4; ++k) CHECK(d.mse[k] == doctest::Approx(mses[k]).epsilon(1e-14));
}

TEST_CASE("block averaging") {
  const Field f(6, 1, {1, 3, 5, 7, 9, 11});
  CHECK(block_average(f, 2).values() == std::vector<double>{2, 6, 10});
  CHECK_THROWS_AS(block_average(f, 4), InvalidArgument);
}
