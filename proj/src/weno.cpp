#include "hyperweno/weno.hpp"

#include <cmath>

#include "hyperweno/error.hpp"
#include "hyperweno/simd/kernels.hpp"
#include "weno_formulas.hpp"

namespace hyperweno::weno {

namespace {

std::size_t interface_count(const Field& padded) {
  if (padded.rows() < 6) throw InvalidArgument("weno: padded field needs at least 6 rows");
  return padded.rows() - 5;
}

template <typename MinusFn, typename PlusFn>
StencilTriples per_stencil(const Field& padded, MinusFn minus_fn, PlusFn plus_fn) {
  StencilTriples out;
  out.n_interfaces = interface_count(padded);
  out.n_components = padded.cols();
  out.minus.resize(out.n_interfaces * out.n_components * 3);
  out.plus.resize(out.minus.size());
  for (std::size_t j = 0; j < out.n_interfaces; ++j) {
    for (std::size_t c = 0; c < out.n_components; ++c) {
      const double a = padded(j, c), b = padded(j + 1, c), m = padded(j + 2, c);
      const double d = padded(j + 3, c), e = padded(j + 4, c), f = padded(j + 5, c);
      const std::size_t o = (j * out.n_components + c) * 3;
      minus_fn(a, b, m, d, e, &out.minus[o]);
      plus_fn(b, m, d, e, f, &out.plus[o]);
    }
  }
  return out;
}

}  // namespace

CandidateValues candidates(const Field& padded) {
  return per_stencil(padded, detail::candidates_minus, detail::candidates_plus);
}

SmoothnessIndicators smoothness_indicators(const Field& padded) {
  return per_stencil(padded, detail::smoothness_minus, detail::smoothness_plus);
}

void classical_weight_row(const double beta[3], const std::array<double, 3>& d, double epsilon, double power,
                          double out[3]) {
  if (power == 2.0) {
    detail::weights_r2(beta, d.data(), epsilon, out);
    return;
  }
  double a[3];
  for (int k = 0; k < 3; ++k) a[k] = d[k] / std::pow(epsilon + beta[k], power);
  const double s = a[0] + a[1] + a[2];
  for (int k = 0; k < 3; ++k) out[k] = a[k] / s;
}

WenoWeights classical_weights(const SmoothnessIndicators& beta, const WenoConfig& config) {
  WenoWeights w;
  w.source = WeightSource::Classical;
  w.rows.n_interfaces = beta.n_interfaces;
  w.rows.n_components = beta.n_components;
  w.rows.minus.resize(beta.minus.size());
  w.rows.plus.resize(beta.plus.size());
  for (std::size_t o = 0; o < beta.minus.size(); o += 3) {
    classical_weight_row(&beta.minus[o], config.d_minus, config.epsilon, config.power, &w.rows.minus[o]);
    classical_weight_row(&beta.plus[o], config.d_plus, config.epsilon, config.power, &w.rows.plus[o]);
  }
  return w;
}

WenoWeights linear_weights(std::size_t n_interfaces, const WenoConfig& config) {
  WenoWeights w;
  w.source = WeightSource::Linear;
  w.rows.n_interfaces = n_interfaces;
  w.rows.n_components = 1;
  w.rows.minus.resize(n_interfaces * 3);
  w.rows.plus.resize(n_interfaces * 3);
  for (std::size_t j = 0; j < n_interfaces; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      w.rows.minus[j * 3 + k] = config.d_minus[k];
      w.rows.plus[j * 3 + k] = config.d_plus[k];
    }
  }
  return w;
}

InterfaceStates reconstruct(const CandidateValues& q, const WenoWeights& w) {
  if (w.rows.n_interfaces != q.n_interfaces ||
      (w.rows.n_components != 1 && w.rows.n_components != q.n_components)) {
    throw ShapeError("reconstruct: weights do not match candidates");
  }
  InterfaceStates out{Field(q.n_interfaces, q.n_components), Field(q.n_interfaces, q.n_components)};
  for (std::size_t j = 0; j < q.n_interfaces; ++j) {
    for (std::size_t c = 0; c < q.n_components; ++c) {
      out.minus(j, c) = detail::combine(w.minus_at(j, c), q.minus_at(j, c));
      out.plus(j, c) = detail::combine(w.plus_at(j, c), q.plus_at(j, c));
    }
  }
  return out;
}

InterfaceStates reconstruct_classical(const Field& padded, const WenoConfig& config) {
  if (config.power != 2.0) {
    return reconstruct(candidates(padded), classical_weights(smoothness_indicators(padded), config));
  }
  const std::size_t n_if = interface_count(padded);
  const std::size_t n_comp = padded.cols();
  simd::Weno5Params params{};
  for (int k = 0; k < 3; ++k) {
    params.d_minus[k] = config.d_minus[k];
    params.d_plus[k] = config.d_plus[k];
  }
  params.epsilon = config.epsilon;

  InterfaceStates out{Field(n_if, n_comp), Field(n_if, n_comp)};
  std::vector<double> strip(padded.rows());
  std::vector<double> um(n_if), up(n_if);
  for (std::size_t c = 0; c < n_comp; ++c) {
    for (std::size_t r = 0; r < padded.rows(); ++r) strip[r] = padded(r, c);
    simd::weno5_classical(strip.data(), n_if, params, um.data(), up.data());
    for (std::size_t j = 0; j < n_if; ++j) {
      out.minus(j, c) = um[j];
      out.plus(j, c) = up[j];
    }
  }
  return out;
}

}  // namespace hyperweno::weno
