#include "hyperweno/networks.hpp"

#include <atomic>
#include <cmath>
#include <random>

#include "hyperweno/autodiff/conv.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"

namespace hyperweno::networks {

namespace {

std::atomic<std::size_t> g_hypernet_evaluations{0};

constexpr std::string_view kCheckpointMagic = "HWCK1";

void uniform_fill(std::vector<double>& v, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : v) x = dist(rng);
}

// x: L x Cin -> L x Cout with a shared kernel.
Field conv_layer(const Field& x, const ad::Tensor& w, const ad::Tensor& b, ad::Padding pad) {
  const ad::ConvShape s{x.rows(), w.shape[0], w.shape[1], w.shape[2], false};
  if (x.cols() != s.in_channels) {
    throw ShapeError("conv layer: input has " + std::to_string(x.cols()) + " channels, kernel expects " +
                     std::to_string(s.in_channels));
  }
  Field y(x.rows(), s.out_channels);
  ad::conv1d_forward(x.values().data(), w.data.data(), b.data.data(), s, pad, y.values().data());
  return y;
}

void tanh_inplace(Field& f) {
  for (double& v : f.values()) v = std::tanh(v);
}

}  // namespace

void validate(const HyperNetConfig& cfg) {
  if (cfg.layers < 1 || cfg.channels < 1) throw InvalidArgument("hypernet: needs at least one layer and channel");
  if (cfg.kernel % 2 == 0) throw InvalidArgument("hypernet: kernel must be odd");
  if (cfg.target.kernel % 2 == 0) throw InvalidArgument("target net: kernel must be odd");
  if (cfg.target.n_components < 1 || cfg.target.n_components > 3) {
    throw InvalidArgument("target net: n_components must be 1, 2 or 3");
  }
}

void validate(const FluxNetConfig& cfg) {
  if (cfg.layers < 1 || cfg.channels < 1) throw InvalidArgument("fluxnet: needs at least one layer and channel");
  if (cfg.kernel != 1 && cfg.kernel != 5) throw InvalidArgument("fluxnet: kernel must be 1 or 5");
}

std::string weight_name(const std::string& prefix, std::size_t layer) {
  return prefix + "l" + std::to_string(layer) + ".w";
}
std::string bias_name(const std::string& prefix, std::size_t layer) {
  return prefix + "l" + std::to_string(layer) + ".b";
}

void init_hypernet(const HyperNetConfig& cfg, const weno::WenoConfig& weno, std::uint64_t seed,
                   ad::ParameterStore& out) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::size_t cin = cfg.layer_in(l), cout = cfg.layer_out(l);
    ad::Tensor w(ad::Shape{cfg.kernel, cin, cout});
    ad::Tensor b(ad::Shape{cout});
    if (l + 1 < cfg.layers) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.kernel * cin));
      uniform_fill(w.data, bound, rng);
      uniform_fill(b.data, bound, rng);
    } else {
      const TargetNetConfig& t = cfg.target;
      const double bound = 1.0 / std::sqrt(static_cast<double>(t.kernel * t.n_components));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (std::size_t i = 0; i < t.w2_offset(); ++i) b.data[i] = dist(rng);
      for (std::size_t k = 0; k < 3; ++k) {
        b.data[t.b2_offset() + k] = std::log(weno.d_minus[k]);
        b.data[t.b2_offset() + 3 + k] = std::log(weno.d_plus[k]);
      }
    }
    out.set(weight_name(kHyperPrefix, l), std::move(w));
    out.set(bias_name(kHyperPrefix, l), std::move(b));
  }
}

void init_fluxnet(const FluxNetConfig& cfg, std::uint64_t seed, ad::ParameterStore& out) {
  validate(cfg);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::size_t cin = cfg.layer_in(l), cout = cfg.layer_out(l);
    ad::Tensor w(ad::Shape{cfg.kernel, cin, cout});
    ad::Tensor b(ad::Shape{cout});
    if (l + 1 < cfg.layers) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.kernel * cin));
      uniform_fill(w.data, bound, rng);
      uniform_fill(b.data, bound, rng);
    }
    out.set(weight_name(kFluxPrefix, l), std::move(w));
    out.set(bias_name(kFluxPrefix, l), std::move(b));
  }
}

Field build_metadata(const Grid& grid, const Field& initial) {
  if (initial.rows() != grid.n_cells) throw ShapeError("build_metadata: state does not match grid");
  const std::size_t n = grid.n_cells, c = initial.cols();
  Field m(n, 2 + c);
  const double len = grid.x_hi - grid.x_lo;
  for (std::size_t i = 0; i < n; ++i) {
    m(i, 0) = grid.dx;
    m(i, 1) = 2.0 * (grid.x_mid[i] - grid.x_lo) / len - 1.0;
    for (std::size_t k = 0; k < c; ++k) m(i, 2 + k) = initial(i, k);
  }
  return m;
}

TargetNetParams split_slab(const TargetNetConfig& cfg, const Field& slab) {
  if (slab.cols() != cfg.p_cell()) {
    throw ShapeError("target slab has " + std::to_string(slab.cols()) + " columns, expected " +
                     std::to_string(cfg.p_cell()));
  }
  TargetNetParams p;
  p.config = cfg;
  p.n_cells = slab.rows();
  auto take = [&](std::vector<double>& dst, std::size_t off, std::size_t width) {
    dst.resize(p.n_cells * width);
    for (std::size_t i = 0; i < p.n_cells; ++i)
      for (std::size_t k = 0; k < width; ++k) dst[i * width + k] = slab(i, off + k);
  };
  take(p.w1, cfg.w1_offset(), cfg.w1_size());
  take(p.b1, cfg.b1_offset(), cfg.hidden);
  take(p.w2, cfg.w2_offset(), cfg.w2_size());
  take(p.b2, cfg.b2_offset(), 6);
  return p;
}

std::size_t hypernet_evaluations() noexcept { return g_hypernet_evaluations.load(); }

Field hypernet_forward(const HyperNetConfig& cfg, const ad::ParameterStore& params, const Field& metadata,
                       BoundaryCondition bc) {
  if (metadata.cols() != cfg.in_channels()) {
    throw ShapeError("hypernet: metadata has " + std::to_string(metadata.cols()) + " channels, expected " +
                     std::to_string(cfg.in_channels()));
  }
  ++g_hypernet_evaluations;
  const ad::Padding pad = ad::padding_for(bc);
  Field h = metadata;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    h = conv_layer(h, params.at(weight_name(kHyperPrefix, l)), params.at(bias_name(kHyperPrefix, l)), pad);
    if (l + 1 < cfg.layers) tanh_inplace(h);
  }
  return h;
}

Field targetnet_forward(const TargetNetParams& p, const Field& u, BoundaryCondition bc) {
  const TargetNetConfig& cfg = p.config;
  if (u.rows() != p.n_cells) {
    throw ShapeError("target net: parameters generated for N=" + std::to_string(p.n_cells) + ", state has N=" +
                     std::to_string(u.rows()));
  }
  if (u.cols() != cfg.n_components) throw ShapeError("target net: component count mismatch");
  const ad::Padding pad = ad::padding_for(bc);
  Field h(u.rows(), cfg.hidden);
  ad::conv1d_forward(u.values().data(), p.w1.data(), p.b1.data(),
                     ad::ConvShape{u.rows(), cfg.kernel, cfg.n_components, cfg.hidden, true}, pad,
                     h.values().data());
  tanh_inplace(h);
  Field eta(u.rows(), 6);
  ad::conv1d_forward(h.values().data(), p.w2.data(), p.b2.data(), ad::ConvShape{u.rows(), 1, cfg.hidden, 6, true},
                     pad, eta.values().data());
  return eta;
}

Field fluxnet_forward(const FluxNetConfig& cfg, const ad::ParameterStore& params, const Field& minus,
                      const Field& plus, BoundaryCondition bc) {
  const std::size_t n_if = minus.rows(), c = minus.cols();
  if (c != cfg.n_components || plus.cols() != c || plus.rows() != n_if) {
    throw ShapeError("fluxnet: interface states do not match the configured component count");
  }
  // Periodic: the N distinct interfaces x_{3/2} .. x_{N+1/2}; x_{1/2} is x_{N+1/2}.
  const std::size_t first = bc == BoundaryCondition::Periodic ? 1 : 0;
  Field x(n_if - first, 2 * c);
  for (std::size_t j = first; j < n_if; ++j) {
    for (std::size_t k = 0; k < c; ++k) {
      x(j - first, 2 * k) = minus(j, k);
      x(j - first, 2 * k + 1) = plus(j, k);
    }
  }
  const ad::Padding pad = ad::padding_for(bc);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    x = conv_layer(x, params.at(weight_name(kFluxPrefix, l)), params.at(bias_name(kFluxPrefix, l)), pad);
    if (l + 1 < cfg.layers) tanh_inplace(x);
  }
  if (first == 0) return x;
  Field out(n_if, c);
  for (std::size_t j = 1; j < n_if; ++j)
    for (std::size_t k = 0; k < c; ++k) out(j, k) = x(j - 1, k);
  for (std::size_t k = 0; k < c; ++k) out(0, k) = out(n_if - 1, k);
  return out;
}

ad::Var hypernet_forward(const HyperNetConfig& cfg, const ad::BoundParameters& params, ad::Var metadata,
                         BoundaryCondition bc) {
  if (metadata.shape().cols() != cfg.in_channels()) throw ShapeError("hypernet: metadata channel mismatch");
  ++g_hypernet_evaluations;
  const ad::Padding pad = ad::padding_for(bc);
  ad::Var h = metadata;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    h = ad::conv1d(h, params[weight_name(kHyperPrefix, l)], params[bias_name(kHyperPrefix, l)], pad);
    if (l + 1 < cfg.layers) h = ad::tanh(h);
  }
  return h;
}

ad::Var targetnet_forward(const TargetNetConfig& cfg, ad::Var slab, ad::Var u, BoundaryCondition bc) {
  if (slab.shape().rows() != u.shape().rows()) throw ShapeError("target net: N mismatch between slab and state");
  if (slab.shape().cols() != cfg.p_cell()) throw ShapeError("target net: slab width mismatch");
  const ad::Padding pad = ad::padding_for(bc);
  ad::Var w1 = ad::slice_cols(slab, cfg.w1_offset(), cfg.b1_offset());
  ad::Var b1 = ad::slice_cols(slab, cfg.b1_offset(), cfg.w2_offset());
  ad::Var w2 = ad::slice_cols(slab, cfg.w2_offset(), cfg.b2_offset());
  ad::Var b2 = ad::slice_cols(slab, cfg.b2_offset(), cfg.p_cell());
  ad::Var h = ad::tanh(ad::conv1d_local(u, w1, b1, cfg.kernel, cfg.hidden, pad));
  return ad::conv1d_local(h, w2, b2, 1, 6, pad);
}

ad::Var fluxnet_forward(const FluxNetConfig& cfg, const ad::BoundParameters& params, ad::Var minus, ad::Var plus,
                        BoundaryCondition bc) {
  const std::size_t n_if = minus.shape().rows(), c = cfg.n_components;
  if (minus.shape().cols() != c || !(plus.shape() == minus.shape())) throw ShapeError("fluxnet: input mismatch");
  const bool periodic = bc == BoundaryCondition::Periodic;
  if (periodic) {
    minus = ad::slice_rows(minus, 1, n_if);
    plus = ad::slice_rows(plus, 1, n_if);
  }
  std::vector<ad::Var> parts;
  for (std::size_t k = 0; k < c; ++k) {
    parts.push_back(c == 1 ? minus : ad::slice_cols(minus, k, k + 1));
    parts.push_back(c == 1 ? plus : ad::slice_cols(plus, k, k + 1));
  }
  ad::Var x = ad::concat_cols(parts);
  const ad::Padding pad = ad::padding_for(bc);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    x = ad::conv1d(x, params[weight_name(kFluxPrefix, l)], params[bias_name(kFluxPrefix, l)], pad);
    if (l + 1 < cfg.layers) x = ad::tanh(x);
  }
  if (!periodic) return x;
  const ad::Var rows[2] = {ad::slice_rows(x, n_if - 2, n_if - 1), x};
  return ad::concat_rows(rows);
}

std::size_t logit_row(std::size_t j, std::size_t n_cells, BoundaryCondition bc) noexcept {
  if (j > 0) return j - 1;
  return bc == BoundaryCondition::Periodic ? n_cells - 1 : 0;
}

weno::WenoWeights logits_to_weights(const Field& logits, BoundaryCondition bc) {
  if (logits.cols() != 6) throw ShapeError("logits must have 6 columns");
  const std::size_t n = logits.rows();
  weno::WenoWeights w;
  w.source = weno::WeightSource::Learned;
  w.rows.n_interfaces = n + 1;
  w.rows.n_components = 1;
  w.rows.minus.resize((n + 1) * 3);
  w.rows.plus.resize((n + 1) * 3);
  auto softmax3 = [](const double* z, double* y) {
    const double mx = std::max(z[0], std::max(z[1], z[2]));
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (y[k] = std::exp(z[k] - mx));
    for (int k = 0; k < 3; ++k) y[k] /= s;
  };
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t r = logit_row(j, n, bc);
    softmax3(logits.row(r).data(), &w.rows.minus[j * 3]);
    softmax3(logits.row(r).data() + 3, &w.rows.plus[j * 3]);
  }
  return w;
}

std::string encode_checkpoint(const ad::ParameterStore& params) {
  io::ByteWriter w;
  w.bytes(kCheckpointMagic);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(t.shape.rank()));
    for (std::size_t d = 0; d < t.shape.rank(); ++d) w.u64(t.shape[d]);
    for (double v : t.data) w.f64(v);
  }
  return w.data();
}

ad::ParameterStore decode_checkpoint(std::string bytes) {
  io::ByteReader r(std::move(bytes));
  r.expect_magic(kCheckpointMagic);
  const std::uint32_t n = r.u32();
  ad::ParameterStore out;
  for (std::uint32_t e = 0; e < n; ++e) {
    const std::size_t at = r.offset();
    std::string name = r.str(4096);
    if (out.contains(name)) throw FormatError("duplicate checkpoint entry \"" + name + "\"", at);
    const std::size_t rank_at = r.offset();
    const std::uint32_t rank = r.u32();
    if (rank > ad::kMaxRank) throw FormatError("entry rank " + std::to_string(rank) + " above 3", rank_at);
    std::vector<std::size_t> dims;
    std::uint64_t count = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint64_t dim = r.u64();
      count = r.checked_count(count, dim, 8);
      dims.push_back(static_cast<std::size_t>(dim));
    }
    std::vector<double> data(static_cast<std::size_t>(count));
    for (double& v : data) v = r.f64();
    out.set(name, ad::Tensor(ad::Shape::of(dims), std::move(data)));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last entry", r.offset());
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ad::ParameterStore& params) {
  io::atomic_write(path, encode_checkpoint(params));
}

ad::ParameterStore load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

}  // namespace hyperweno::networks
