#include "hyperweno/stepper.hpp"

#include <cmath>
#include <limits>

#include "hyperweno/error.hpp"

namespace hyperweno::stepper {

void check_divergence(const Field& u) {
  for (double v : u.values()) {
    if (!(std::abs(v) <= kDivergenceThreshold)) {
      throw StepDiverged("state entry " + std::to_string(v) + " exceeds divergence threshold");
    }
  }
}

StepResult ssp_rk3_step(const Field& u, double dt, const RhsOperator& rhs) {
  if (!(dt > 0.0)) throw InvalidArgument("ssp_rk3_step: dt must be positive");
  const std::size_t n = u.size();

  const physics::RhsResult r0 = rhs(u);
  Field u1 = u;
  for (std::size_t i = 0; i < n; ++i) u1.values()[i] = u.values()[i] + dt * r0.dudt.values()[i];
  check_divergence(u1);

  const physics::RhsResult r1 = rhs(u1);
  Field u2 = u;
  for (std::size_t i = 0; i < n; ++i) {
    u2.values()[i] = 0.75 * u.values()[i] + 0.25 * (u1.values()[i] + dt * r1.dudt.values()[i]);
  }
  check_divergence(u2);

  const physics::RhsResult r2 = rhs(u2);
  Field next = u;
  for (std::size_t i = 0; i < n; ++i) {
    next.values()[i] = u.values()[i] / 3.0 + 2.0 / 3.0 * (u2.values()[i] + dt * r2.dudt.values()[i]);
  }
  check_divergence(next);

  const std::size_t nc = u.cols();
  const std::size_t last = r0.f_hat.rows() - 1;
  Field bf(2, nc);
  for (std::size_t c = 0; c < nc; ++c) {
    bf(0, c) = r0.f_hat(0, c) / 6.0 + r1.f_hat(0, c) / 6.0 + 2.0 / 3.0 * r2.f_hat(0, c);
    bf(1, c) = r0.f_hat(last, c) / 6.0 + r1.f_hat(last, c) / 6.0 + 2.0 / 3.0 * r2.f_hat(last, c);
  }
  return {std::move(next), std::move(bf)};
}

RolloutRecord rollout(const Grid& grid, BoundaryCondition bc, const State& initial, std::size_t n_steps,
                      double dt, const RhsOperator& rhs) {
  RolloutRecord rec;
  rec.grid = grid;
  rec.bc = bc;
  rec.dt = dt;
  rec.snapshots.reserve(n_steps + 1);
  rec.snapshots.push_back(initial);
  const std::size_t nc = initial.n_components();
  std::vector<double> log;
  log.reserve(n_steps * 2 * nc);

  Field u = initial.u;
  for (std::size_t m = 0; m < n_steps; ++m) {
    try {
      StepResult s = ssp_rk3_step(u, dt, rhs);
      u = std::move(s.u);
      for (std::size_t c = 0; c < nc; ++c) log.push_back(s.boundary_flux(0, c));
      for (std::size_t c = 0; c < nc; ++c) log.push_back(s.boundary_flux(1, c));
    } catch (const StepDiverged& e) {
      rec.diverged = true;
      rec.error = e.what();
      break;
    } catch (const NonPhysicalState& e) {
      rec.diverged = true;
      rec.error = e.what();
      break;
    }
    rec.snapshots.push_back({u, initial.t + static_cast<double>(m + 1) * dt});
  }
  const std::size_t rows = log.size() / (2 * nc);
  rec.boundary_flux_log = Field(rows, 2 * nc, std::move(log));
  return rec;
}

std::vector<double> conservation_remainder(const RolloutRecord& record, std::size_t component) {
  std::vector<double> out;
  if (record.snapshots.empty()) return out;
  const std::size_t nc = record.n_components();
  if (component >= nc) throw InvalidArgument("conservation_remainder: component out of range");
  const Field& u0 = record.snapshots.front().u;
  const double dx = record.grid.dx;
  const bool periodic = record.bc == BoundaryCondition::Periodic;

  double boundary = 0.0;
  out.reserve(record.snapshots.size());
  for (std::size_t l = 0; l < record.snapshots.size(); ++l) {
    if (l > 0 && !periodic) {
      const std::size_t k = l - 1;
      boundary += (record.boundary_flux_log(k, component) - record.boundary_flux_log(k, nc + component)) * record.dt;
    }
    // Neumaier sum of per-cell changes.
    const Field& u = record.snapshots[l].u;
    double sum = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < u.rows(); ++j) {
      const double v = (u(j, component) - u0(j, component)) * dx;
      const double t = sum + v;
      comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    out.push_back(std::abs((sum + comp) - boundary));
  }
  return out;
}

StepSchedule schedule(double final_time, double dx, double step_ratio) {
  if (!(final_time >= 0.0) || !(dx > 0.0) || !(step_ratio > 0.0)) {
    throw InvalidArgument("schedule: need T >= 0, dx > 0, step_ratio > 0");
  }
  if (final_time == 0.0) return {0, step_ratio * dx};
  const double dt_max = step_ratio * dx;
  const auto n = static_cast<std::size_t>(std::ceil(final_time / dt_max * (1.0 - 1e-12)));
  const std::size_t steps = n == 0 ? 1 : n;
  return {steps, final_time / static_cast<double>(steps)};
}

double mean_squared_error(const Field& prediction, const Field& reference) {
  if (prediction.rows() != reference.rows() || prediction.cols() != reference.cols()) {
    throw ShapeError("mean_squared_error: shape mismatch (" + std::to_string(prediction.rows()) + " vs " +
                     std::to_string(reference.rows()) + " rows)");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double e = prediction.values()[i] - reference.values()[i];
    s += e * e;
  }
  return prediction.size() == 0 ? 0.0 : s / static_cast<double>(prediction.size());
}

double refinement_order(double mse_coarse, double mse_fine) {
  return 0.5 * std::log2(mse_coarse / mse_fine);
}

Diagnostics mse_and_order(const std::vector<Field>& predictions, const std::vector<Field>& references) {
  if (predictions.size() != references.size()) throw ShapeError("mse_and_order: level count mismatch");
  Diagnostics d;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    d.meshes.push_back(predictions[k].rows());
    d.mse.push_back(mean_squared_error(predictions[k], references[k]));
    d.order.push_back(k == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : refinement_order(d.mse[k - 1], d.mse[k]));
  }
  return d;
}

Field block_average(const Field& fine, std::size_t factor) {
  if (factor == 0 || fine.rows() % factor != 0) {
    throw InvalidArgument("block_average: fine mesh size must be a multiple of the factor");
  }
  Field out(fine.rows() / factor, fine.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t c = 0; c < fine.cols(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < factor; ++k) s += fine(i * factor + k, c);
      out(i, c) = s / static_cast<double>(factor);
    }
  }
  return out;
}

}  // namespace hyperweno::stepper
