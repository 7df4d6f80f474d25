#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "hyperweno/grid.hpp"
#include "hyperweno/weno.hpp"

namespace hyperweno::physics {

enum class SystemKind { Burgers, ShallowWater, Euler };

struct SystemSpec {
  SystemKind kind = SystemKind::Burgers;
  double g = 1.0;      // shallow water
  double gamma = 1.4;  // Euler

  static SystemSpec burgers() { return {SystemKind::Burgers, 1.0, 1.4}; }
  static SystemSpec shallow_water(double g = 1.0);
  static SystemSpec euler(double gamma = 1.4);

  std::size_t n_components() const noexcept;
};

std::string_view to_string(SystemKind kind) noexcept;
SystemKind parse_system_kind(std::string_view name);

// Burgers: u^2/2. Shallow water on (h, hv): (hv, hv^2/h + g h^2/2).
// Euler on (rho, rho u, E): (rho u, rho u^2 + p, u (E + p)).
// Throws NonPhysicalState for h <= 0, rho <= 0 or p <= 0.
void analytical_flux(const SystemSpec& sys, std::span<const double> u, std::span<double> f);

// Spectral radius of the flux Jacobian at one state.
double wave_speed(const SystemSpec& sys, std::span<const double> u);

// max(wave_speed(u_left), wave_speed(u_right))
double max_wave_speed(const SystemSpec& sys, std::span<const double> u_left, std::span<const double> u_right);

// Local Lax-Friedrichs: 0.5 * (f(u-) + f(u+) - alpha * (u+ - u-)).
void rusanov_flux(const SystemSpec& sys, std::span<const double> u_minus, std::span<const double> u_plus,
                  std::span<double> out);

// Largest wave speed over all cells of a state.
double max_wave_speed(const SystemSpec& sys, const Field& u);

// Inputs handed to weight and flux providers for one right-hand-side call.
struct RhsContext {
  const Grid& grid;
  BoundaryCondition bc;
  const Field& state;   // N x C cell averages
  const Field& padded;  // ghost width weno::kGhostWidth
};

// Supplies the convex reconstruction weights for the N + 1 interfaces.
class WeightsProvider {
 public:
  virtual ~WeightsProvider() = default;
  virtual weno::WenoWeights weights(const RhsContext& ctx) const = 0;
  // Default: candidates + weights() + reconstruct.
  virtual weno::InterfaceStates reconstruct(const RhsContext& ctx) const;
};

class ClassicalWeights final : public WeightsProvider {
 public:
  explicit ClassicalWeights(weno::WenoConfig config = {}) : config_(config) {}
  weno::WenoWeights weights(const RhsContext& ctx) const override;
  weno::InterfaceStates reconstruct(const RhsContext& ctx) const override;

 private:
  weno::WenoConfig config_;
};

// Fixed optimal linear weights d_k everywhere (the unlimited fifth-order scheme).
class LinearWeights final : public WeightsProvider {
 public:
  explicit LinearWeights(weno::WenoConfig config = {}) : config_(config) {}
  weno::WenoWeights weights(const RhsContext& ctx) const override;

 private:
  weno::WenoConfig config_;
};

// Numerical flux for all N + 1 interfaces; `out` is (N + 1) x C. Must be
// deterministic so that per-interface evaluation order does not matter.
class FluxProvider {
 public:
  virtual ~FluxProvider() = default;
  virtual void fluxes(const weno::InterfaceStates& states, BoundaryCondition bc, Field& out) const = 0;
};

class RusanovFlux final : public FluxProvider {
 public:
  explicit RusanovFlux(SystemSpec sys) : sys_(sys) {}
  void fluxes(const weno::InterfaceStates& states, BoundaryCondition bc, Field& out) const override;

 private:
  SystemSpec sys_;
};

struct RhsResult {
  Field dudt;   // N x C
  Field f_hat;  // (N + 1) x C, row 0 at x_{1/2}, row N at x_{N+1/2}

  std::span<const double> left_boundary_flux() const { return f_hat.row(0); }
  std::span<const double> right_boundary_flux() const { return f_hat.row(f_hat.rows() - 1); }
};

// du_i/dt = -(f_{i+1/2} - f_{i-1/2}) / dx with one flux value per interface.
// For periodic bc the two boundary fluxes are the same value.
RhsResult semi_discrete_rhs(const Grid& grid, BoundaryCondition bc, const Field& state,
                            const WeightsProvider& weights, const FluxProvider& flux);

}  // namespace hyperweno::physics
