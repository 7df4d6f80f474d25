#include "hyperweno/scheme.hpp"

#include <cmath>

#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"

namespace hyperweno::scheme {

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::Classical: return "classical";
    case SchemeKind::Linear: return "linear";
    case SchemeKind::HyperCfcnn: return "hcfcnn";
    case SchemeKind::HyperCfcnnF: return "hcfcnn-f";
  }
  return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  if (name == "classical" || name == "weno5") return SchemeKind::Classical;
  if (name == "linear") return SchemeKind::Linear;
  if (name == "hcfcnn") return SchemeKind::HyperCfcnn;
  if (name == "hcfcnn-f") return SchemeKind::HyperCfcnnF;
  throw InvalidArgument("unknown scheme: " + std::string(name));
}

std::vector<std::string> Model::trainable_names() const {
  std::vector<std::string> out;
  if (learned_weights()) out = params.names_with_prefix(networks::kHyperPrefix);
  if (learned_flux()) {
    auto f = params.names_with_prefix(networks::kFluxPrefix);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

networks::FluxNetConfig default_fluxnet_config(const physics::SystemSpec& sys) {
  networks::FluxNetConfig cfg;
  cfg.n_components = sys.n_components();
  if (sys.kind == physics::SystemKind::Euler) cfg.kernel = 1;
  return cfg;
}

Model make_model(SchemeKind kind, const physics::SystemSpec& sys, std::uint64_t seed, networks::HyperNetConfig hyper,
                 std::optional<networks::FluxNetConfig> flux, weno::WenoConfig weno) {
  Model m;
  m.kind = kind;
  m.system = sys;
  m.weno = weno;
  m.hyper = hyper;
  m.hyper.target.n_components = sys.n_components();
  m.flux = flux.value_or(default_fluxnet_config(sys));
  m.flux.n_components = sys.n_components();
  networks::validate(m.hyper);
  networks::validate(m.flux);
  if (m.learned_weights()) networks::init_hypernet(m.hyper, m.weno, seed, m.params);
  if (m.learned_flux()) networks::init_fluxnet(m.flux, seed, m.params);
  return m;
}

namespace {

ad::Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return ad::Tensor(ad::Shape{n}, std::move(v));
}

std::size_t as_size(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) throw FormatError(std::string("bad meta value for ") + what);
  return static_cast<std::size_t>(v);
}

const std::vector<double>& meta(const ad::ParameterStore& s, const std::string& name, std::size_t n) {
  if (!s.contains(name)) throw FormatError("checkpoint lacks " + name);
  const auto& d = s.at(name).data;
  if (d.size() != n) throw FormatError("checkpoint entry " + name + " has wrong length");
  return d;
}

}  // namespace

ad::ParameterStore model_to_store(const Model& m) {
  ad::ParameterStore s = m.params;
  s.set("meta.scheme", vec({static_cast<double>(m.kind)}));
  s.set("meta.system", vec({static_cast<double>(m.system.kind), m.system.g, m.system.gamma}));
  s.set("meta.weno", vec({m.weno.epsilon, m.weno.power, m.weno.d_minus[0], m.weno.d_minus[1], m.weno.d_minus[2],
                          m.weno.d_plus[0], m.weno.d_plus[1], m.weno.d_plus[2]}));
  s.set("meta.hyper", vec({double(m.hyper.layers), double(m.hyper.channels), double(m.hyper.kernel),
                           double(m.hyper.target.hidden), double(m.hyper.target.kernel)}));
  s.set("meta.flux", vec({double(m.flux.layers), double(m.flux.channels), double(m.flux.kernel)}));
  return s;
}

Model model_from_store(ad::ParameterStore s) {
  Model m;
  const auto& sc = meta(s, "meta.scheme", 1);
  const std::size_t kind = as_size(sc[0], "scheme");
  if (kind > 3) throw FormatError("unknown scheme id in checkpoint");
  m.kind = static_cast<SchemeKind>(kind);
  const auto& sy = meta(s, "meta.system", 3);
  const std::size_t sk = as_size(sy[0], "system");
  if (sk > 2) throw FormatError("unknown system id in checkpoint");
  m.system = {static_cast<physics::SystemKind>(sk), sy[1], sy[2]};
  const auto& w = meta(s, "meta.weno", 8);
  m.weno.epsilon = w[0];
  m.weno.power = w[1];
  for (int k = 0; k < 3; ++k) {
    m.weno.d_minus[k] = w[2 + k];
    m.weno.d_plus[k] = w[5 + k];
  }
  const auto& h = meta(s, "meta.hyper", 5);
  m.hyper.layers = as_size(h[0], "hyper.layers");
  m.hyper.channels = as_size(h[1], "hyper.channels");
  m.hyper.kernel = as_size(h[2], "hyper.kernel");
  m.hyper.target.hidden = as_size(h[3], "target.hidden");
  m.hyper.target.kernel = as_size(h[4], "target.kernel");
  m.hyper.target.n_components = m.system.n_components();
  const auto& f = meta(s, "meta.flux", 3);
  m.flux.layers = as_size(f[0], "flux.layers");
  m.flux.channels = as_size(f[1], "flux.channels");
  m.flux.kernel = as_size(f[2], "flux.kernel");
  m.flux.n_components = m.system.n_components();
  try {
    networks::validate(m.hyper);
    networks::validate(m.flux);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint architecture invalid: ") + e.what());
  }
  for (const auto& name : s.names_with_prefix("meta.")) s.erase(name);
  // Shape check against the declared architecture.
  auto check = [&](const std::string& prefix, std::size_t layers, std::size_t kernel, auto in, auto out) {
    for (std::size_t l = 0; l < layers; ++l) {
      const auto wn = networks::weight_name(prefix, l), bn = networks::bias_name(prefix, l);
      if (!s.contains(wn) || !s.contains(bn)) throw FormatError("checkpoint lacks " + wn);
      if (!(s.at(wn).shape == ad::Shape{kernel, in(l), out(l)}) || !(s.at(bn).shape == ad::Shape{out(l)})) {
        throw FormatError("checkpoint entry " + wn + " has the wrong shape");
      }
    }
  };
  if (m.learned_weights()) {
    check(networks::kHyperPrefix, m.hyper.layers, m.hyper.kernel, [&](std::size_t l) { return m.hyper.layer_in(l); },
          [&](std::size_t l) { return m.hyper.layer_out(l); });
  }
  if (m.learned_flux()) {
    check(networks::kFluxPrefix, m.flux.layers, m.flux.kernel, [&](std::size_t l) { return m.flux.layer_in(l); },
          [&](std::size_t l) { return m.flux.layer_out(l); });
  }
  m.params = std::move(s);
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  networks::save_checkpoint(path, model_to_store(model));
}

Model load_model(const std::filesystem::path& path) { return model_from_store(networks::load_checkpoint(path)); }

weno::WenoWeights LearnedWeights::weights(const physics::RhsContext& ctx) const {
  return networks::logits_to_weights(networks::targetnet_forward(params_, ctx.state, ctx.bc), ctx.bc);
}

void FluxNetFlux::fluxes(const weno::InterfaceStates& states, BoundaryCondition bc, Field& out) const {
  out = networks::fluxnet_forward(cfg_, *params_, states.minus, states.plus, bc);
}

Instance::Instance(const Model& model, const Grid& grid, BoundaryCondition bc, const Field& initial)
    : model_(&model), grid_(grid), bc_(bc) {
  if (initial.cols() != model.system.n_components()) {
    throw ShapeError("initial state has " + std::to_string(initial.cols()) + " components, system needs " +
                     std::to_string(model.system.n_components()));
  }
  switch (model.kind) {
    case SchemeKind::Classical:
      weights_ = std::make_unique<physics::ClassicalWeights>(model.weno);
      break;
    case SchemeKind::Linear:
      weights_ = std::make_unique<physics::LinearWeights>(model.weno);
      break;
    case SchemeKind::HyperCfcnn:
    case SchemeKind::HyperCfcnnF: {
      const Field slab =
          networks::hypernet_forward(model.hyper, model.params, networks::build_metadata(grid, initial), bc);
      weights_ = std::make_unique<LearnedWeights>(networks::split_slab(model.hyper.target, slab));
      break;
    }
  }
  if (model.learned_flux()) {
    flux_ = std::make_unique<FluxNetFlux>(model.flux, model.params);
  } else {
    flux_ = std::make_unique<physics::RusanovFlux>(model.system);
  }
}

physics::RhsResult Instance::rhs(const Field& u) const {
  return physics::semi_discrete_rhs(grid_, bc_, u, *weights_, *flux_);
}

stepper::RhsOperator Instance::op() const {
  return [this](const Field& u) { return rhs(u); };
}

const networks::TargetNetParams* Instance::target() const noexcept {
  auto* lw = dynamic_cast<const LearnedWeights*>(weights_.get());
  return lw ? &lw->params() : nullptr;
}

stepper::RolloutRecord run_rollout(const Model& model, const Grid& grid, BoundaryCondition bc, const State& initial,
                                   std::size_t n_steps, double dt) {
  const Instance inst(model, grid, bc, initial.u);
  return stepper::rollout(grid, bc, initial, n_steps, dt, inst.op());
}

}  // namespace hyperweno::scheme
