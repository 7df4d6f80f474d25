#include "hyperweno/physics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "hyperweno/error.hpp"

namespace hyperweno::physics {

SystemSpec SystemSpec::shallow_water(double g) {
  if (!(g > 0.0)) throw InvalidArgument("shallow water: g must be positive");
  return {SystemKind::ShallowWater, g, 1.4};
}

SystemSpec SystemSpec::euler(double gamma) {
  if (!(gamma > 1.0)) throw InvalidArgument("euler: gamma must exceed 1");
  return {SystemKind::Euler, 1.0, gamma};
}

std::size_t SystemSpec::n_components() const noexcept {
  switch (kind) {
    case SystemKind::Burgers: return 1;
    case SystemKind::ShallowWater: return 2;
    case SystemKind::Euler: return 3;
  }
  return 0;
}

std::string_view to_string(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::Burgers: return "burgers";
    case SystemKind::ShallowWater: return "shallow_water";
    case SystemKind::Euler: return "euler";
  }
  return "unknown";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "burgers") return SystemKind::Burgers;
  if (name == "shallow_water" || name == "shallow") return SystemKind::ShallowWater;
  if (name == "euler") return SystemKind::Euler;
  throw InvalidArgument("unknown system: " + std::string(name));
}

namespace {

[[noreturn]] void non_physical(const char* what, std::span<const double> u) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at state (";
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
  os << ")";
  throw NonPhysicalState(os.str());
}

double euler_pressure(double gamma, std::span<const double> u) {
  if (!(u[0] > 0.0)) non_physical("non-positive density", u);
  const double vel = u[1] / u[0];
  const double p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * vel);
  if (!(p > 0.0)) non_physical("non-positive pressure", u);
  return p;
}

}  // namespace

void analytical_flux(const SystemSpec& sys, std::span<const double> u, std::span<double> f) {
  switch (sys.kind) {
    case SystemKind::Burgers:
      f[0] = 0.5 * u[0] * u[0];
      return;
    case SystemKind::ShallowWater: {
      if (!(u[0] > 0.0)) non_physical("non-positive depth", u);
      const double v = u[1] / u[0];
      f[0] = u[1];
      f[1] = u[1] * v + 0.5 * sys.g * u[0] * u[0];
      return;
    }
    case SystemKind::Euler: {
      const double p = euler_pressure(sys.gamma, u);
      const double vel = u[1] / u[0];
      f[0] = u[1];
      f[1] = u[1] * vel + p;
      f[2] = vel * (u[2] + p);
      return;
    }
  }
}

double wave_speed(const SystemSpec& sys, std::span<const double> u) {
  switch (sys.kind) {
    case SystemKind::Burgers:
      return std::abs(u[0]);
    case SystemKind::ShallowWater:
      if (!(u[0] > 0.0)) non_physical("non-positive depth", u);
      return std::abs(u[1] / u[0]) + std::sqrt(sys.g * u[0]);
    case SystemKind::Euler: {
      const double p = euler_pressure(sys.gamma, u);
      return std::abs(u[1] / u[0]) + std::sqrt(sys.gamma * p / u[0]);
    }
  }
  return 0.0;
}

double max_wave_speed(const SystemSpec& sys, std::span<const double> u_left, std::span<const double> u_right) {
  return std::max(wave_speed(sys, u_left), wave_speed(sys, u_right));
}

double max_wave_speed(const SystemSpec& sys, const Field& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) s = std::max(s, wave_speed(sys, u.row(i)));
  return s;
}

void rusanov_flux(const SystemSpec& sys, std::span<const double> u_minus, std::span<const double> u_plus,
                  std::span<double> out) {
  const std::size_t n = sys.n_components();
  double fm[3], fp[3];
  analytical_flux(sys, u_minus, {fm, n});
  analytical_flux(sys, u_plus, {fp, n});
  const double alpha = max_wave_speed(sys, u_minus, u_plus);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = 0.5 * (fm[k] + fp[k] - alpha * (u_plus[k] - u_minus[k]));
  }
}

weno::InterfaceStates WeightsProvider::reconstruct(const RhsContext& ctx) const {
  return weno::reconstruct(weno::candidates(ctx.padded), weights(ctx));
}

weno::WenoWeights ClassicalWeights::weights(const RhsContext& ctx) const {
  return weno::classical_weights(weno::smoothness_indicators(ctx.padded), config_);
}

weno::InterfaceStates ClassicalWeights::reconstruct(const RhsContext& ctx) const {
  return weno::reconstruct_classical(ctx.padded, config_);
}

weno::WenoWeights LinearWeights::weights(const RhsContext& ctx) const {
  return weno::linear_weights(ctx.padded.rows() - 5, config_);
}

void RusanovFlux::fluxes(const weno::InterfaceStates& states, BoundaryCondition /*bc*/, Field& out) const {
  for (std::size_t j = 0; j < states.minus.rows(); ++j) {
    rusanov_flux(sys_, states.minus.row(j), states.plus.row(j), out.row(j));
  }
}

RhsResult semi_discrete_rhs(const Grid& grid, BoundaryCondition bc, const Field& state,
                            const WeightsProvider& weights, const FluxProvider& flux) {
  const std::size_t n = state.rows();
  const std::size_t nc = state.cols();
  if (n != grid.n_cells) throw ShapeError("semi_discrete_rhs: state does not match grid");

  const Field padded = pad_ghost(state, bc, weno::kGhostWidth);
  const RhsContext ctx{grid, bc, state, padded};
  const weno::InterfaceStates states = weights.reconstruct(ctx);

  RhsResult r{Field(n, nc), Field(n + 1, nc)};
  flux.fluxes(states, bc, r.f_hat);
  if (bc == BoundaryCondition::Periodic) {
    for (std::size_t c = 0; c < nc; ++c) r.f_hat(0, c) = r.f_hat(n, c);
  }
  const double inv_dx = 1.0 / grid.dx;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < nc; ++c) {
      r.dudt(i, c) = -(r.f_hat(i + 1, c) - r.f_hat(i, c)) * inv_dx;
    }
  }
  return r;
}

}  // namespace hyperweno::physics
