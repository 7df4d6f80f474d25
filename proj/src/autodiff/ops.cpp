#include "hyperweno/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>

#include "hyperweno/error.hpp"

namespace hyperweno::ad {

namespace {

Tape& same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw InvalidArgument("autodiff: operands live on different tapes");
  return *a.tape;
}

// z_i = f(x_i, y_i); dfx/dfy give the local partials from (x, y, z).
template <typename F, typename Dx, typename Dy>
Var binary(Var a, Var b, const char* name, F f, Dx dfx, Dy dfy) {
  Tape& t = same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool a_bcast = av.numel() == 1 && bv.numel() != 1;
  const bool b_bcast = bv.numel() == 1 && av.numel() != 1;
  if (!a_bcast && !b_bcast && !(av.shape == bv.shape)) {
    throw ShapeError(std::string(name) + ": shape mismatch " + av.shape.str() + " vs " + bv.shape.str());
  }
  Tensor out(a_bcast ? bv.shape : av.shape);
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = f(av.data[a_bcast ? 0 : i], bv.data[b_bcast ? 0 : i]);
  }
  const std::size_t ia = a.id, ib = b.id;
  const bool rga = a.requires_grad(), rgb = b.requires_grad();
  Var z = t.record(std::move(out), rga || rgb, {});
  if (!z.requires_grad()) return z;
  const std::size_t iz = z.id;
  // Re-record with the closure now that the output id is known.
  auto fn = [ia, ib, iz, rga, rgb, a_bcast, b_bcast, dfx, dfy](Tape& tp, std::span<const double> g) {
    const Tensor& x = tp.value(ia);
    const Tensor& y = tp.value(ib);
    const Tensor& zv = tp.value(iz);
    const std::size_t m = g.size();
    if (rga) {
      auto& gx = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < m; ++i) {
        const double xi = x.data[a_bcast ? 0 : i], yi = y.data[b_bcast ? 0 : i];
        gx[a_bcast ? 0 : i] += g[i] * dfx(xi, yi, zv.data[i]);
      }
    }
    if (rgb) {
      auto& gy = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < m; ++i) {
        const double xi = x.data[a_bcast ? 0 : i], yi = y.data[b_bcast ? 0 : i];
        gy[b_bcast ? 0 : i] += g[i] * dfy(xi, yi, zv.data[i]);
      }
    }
  };
  t.set_backward(z.id, std::move(fn));
  return z;
}

template <typename F, typename D>
Var unary(Var a, F f, D df) {
  Tape& t = *a.tape;
  const Tensor& av = a.value();
  Tensor out(av.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = f(av.data[i]);
  Var z = t.record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id, iz = z.id;
  t.set_backward(iz, [ia, iz, df](Tape& tp, std::span<const double> g) {
    const Tensor& x = tp.value(ia);
    const Tensor& zv = tp.value(iz);
    auto& gx = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(x.data[i], zv.data[i]);
  });
  return z;
}

void require_rank2(const Tensor& v, const char* name) {
  if (v.shape.rank() != 2) throw ShapeError(std::string(name) + ": expected rank-2 input, got " + v.shape.str());
}

}  // namespace

Var add(Var a, Var b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Var div(Var a, Var b) {
  return binary(
      a, b, "div", [](double x, double y) { return x / y; }, [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double z) { return -z / y; });
}

Var maximum(Var a, Var b) {
  return binary(
      a, b, "maximum", [](double x, double y) { return x >= y ? x : y; },
      [](double x, double y, double) { return x >= y ? 1.0 : 0.0; },
      [](double x, double y, double) { return x >= y ? 0.0 : 1.0; });
}

Var neg(Var a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Var scale(Var a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_scalar(Var a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var square(Var a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double z) { return 1.0 - z * z; });
}

Var exp(Var a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double z) { return z; });
}

Var sqrt(Var a) {
  return unary(a, [](double x) { return std::sqrt(x); }, [](double, double z) { return 0.5 / z; });
}

Var abs(Var a) {
  return unary(
      a, [](double x) { return std::abs(x); }, [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var reciprocal(Var a) {
  return unary(a, [](double x) { return 1.0 / x; }, [](double, double z) { return -z * z; });
}

Var reduce_sum(Var a) {
  Tape& t = *a.tape;
  double s = 0.0;
  for (double v : a.value().data) s += v;
  Var z = t.record(Tensor::scalar(s), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  t.set_backward(z.id, [ia](Tape& tp, std::span<const double> g) {
    for (double& v : tp.grad_buffer(ia)) v += g[0];
  });
  return z;
}

Var reduce_mean(Var a) { return scale(reduce_sum(a), 1.0 / static_cast<double>(a.value().numel())); }

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  if (av.shape.rank() < 1 || begin > end || end > av.shape.rows()) throw ShapeError("slice_rows: bad range");
  const std::size_t cols = av.shape.cols();
  std::vector<std::size_t> dims = av.shape.dims();
  dims[0] = end - begin;
  Tensor out(Shape::of(dims),
             std::vector<double>(av.data.begin() + static_cast<long>(begin * cols),
                                 av.data.begin() + static_cast<long>(end * cols)));
  Var z = a.tape->record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia, begin, cols](Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[begin * cols + i] += g[i];
  });
  return z;
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  require_rank2(av, "slice_cols");
  const std::size_t rows = av.shape[0], cols = av.shape[1];
  if (begin > end || end > cols) throw ShapeError("slice_cols: bad range");
  const std::size_t w = end - begin;
  Tensor out(Shape{rows, w});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < w; ++c) out.data[r * w + c] = av.data[r * cols + begin + c];
  Var z = a.tape->record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia, rows, cols, begin, w](Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < w; ++c) ga[r * cols + begin + c] += g[r * w + c];
  });
  return z;
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Tape& t = *parts[0].tape;
  const std::size_t rows = parts[0].value().shape.rows();
  std::size_t total = 0;
  bool rg = false;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    if (p.tape != &t) throw InvalidArgument("concat_cols: mixed tapes");
    require_rank2(p.value(), "concat_cols");
    if (p.value().shape.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    ids.push_back(p.id);
    widths.push_back(p.value().shape.cols());
    total += widths.back();
    rg = rg || p.requires_grad();
  }
  Tensor out(Shape{rows, total});
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < widths[k]; ++c) out.data[r * total + off + c] = v.data[r * widths[k] + c];
    off += widths[k];
  }
  Var z = t.record(std::move(out), rg, {});
  if (!z.requires_grad()) return z;
  t.set_backward(z.id, [ids, widths, rows, total](Tape& tp, std::span<const double> g) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.requires_grad(ids[k])) {
        auto& gk = tp.grad_buffer(ids[k]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < widths[k]; ++c) gk[r * widths[k] + c] += g[r * total + o + c];
      }
      o += widths[k];
    }
  });
  return z;
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Tape& t = *parts[0].tape;
  const std::size_t cols = parts[0].value().shape.cols();
  std::size_t rows = 0;
  bool rg = false;
  std::vector<std::size_t> ids, sizes;
  for (const Var& p : parts) {
    if (p.tape != &t) throw InvalidArgument("concat_rows: mixed tapes");
    if (p.value().shape.cols() != cols) throw ShapeError("concat_rows: column count mismatch");
    ids.push_back(p.id);
    sizes.push_back(p.value().numel());
    rows += p.value().shape.rows();
    rg = rg || p.requires_grad();
  }
  Tensor out(Shape{rows, cols});
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().data.begin(), p.value().data.end(), out.data.begin() + static_cast<long>(off));
    off += p.value().numel();
  }
  Var z = t.record(std::move(out), rg, {});
  if (!z.requires_grad()) return z;
  t.set_backward(z.id, [ids, sizes](Tape& tp, std::span<const double> g) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.requires_grad(ids[k])) {
        auto& gk = tp.grad_buffer(ids[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) gk[i] += g[o + i];
      }
      o += sizes[k];
    }
  });
  return z;
}

Var gather_rows(Var a, std::vector<std::size_t> index) {
  const Tensor& av = a.value();
  const std::size_t rows = av.shape.rows(), cols = av.shape.cols();
  Tensor out(Shape{index.size(), cols});
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= rows) throw ShapeError("gather_rows: index out of range");
    std::copy_n(av.data.begin() + static_cast<long>(index[r] * cols), cols,
                out.data.begin() + static_cast<long>(r * cols));
  }
  Var z = a.tape->record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia, idx = std::move(index), cols](Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < cols; ++c) ga[idx[r] * cols + c] += g[r * cols + c];
  });
  return z;
}

Var repeat_cols(Var a, std::size_t c) {
  const Tensor& av = a.value();
  if (av.shape.cols() != 1) throw ShapeError("repeat_cols: input must have one column");
  const std::size_t rows = av.shape.rows();
  Tensor out(Shape{rows, c});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < c; ++k) out.data[r * c + k] = av.data[r];
  Var z = a.tape->record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia, rows, c](Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t k = 0; k < c; ++k) ga[r] += g[r * c + k];
  });
  return z;
}

Var reshape(Var a, Shape shape) {
  if (shape.numel() != a.value().numel()) throw ShapeError("reshape: element count mismatch");
  Var z = a.tape->record(Tensor(shape, a.value().data), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia](Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
  return z;
}

Var stencil(Var a, std::vector<std::size_t> offsets, std::vector<double> coeffs, std::size_t n_out) {
  const Tensor& av = a.value();
  if (offsets.size() != coeffs.size()) throw InvalidArgument("stencil: offsets/coeffs length mismatch");
  const std::size_t rows = av.shape.rows(), cols = av.shape.cols();
  for (std::size_t o : offsets)
    if (o + n_out > rows) throw ShapeError("stencil: window exceeds input rows");
  Tensor out(Shape{n_out, cols});
  for (std::size_t j = 0; j < n_out; ++j) {
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t m = 0; m < offsets.size(); ++m) s += coeffs[m] * av.data[(j + offsets[m]) * cols + c];
      out.data[j * cols + c] = s;
    }
  }
  Var z = a.tape->record(std::move(out), a.requires_grad(), {});
  if (!z.requires_grad()) return z;
  const std::size_t ia = a.id;
  a.tape->set_backward(z.id, [ia, off = std::move(offsets), co = std::move(coeffs), n_out, cols](
                                 Tape& tp, std::span<const double> g) {
    auto& ga = tp.grad_buffer(ia);
    for (std::size_t j = 0; j < n_out; ++j)
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t m = 0; m < off.size(); ++m) ga[(j + off[m]) * cols + c] += co[m] * g[j * cols + c];
  });
  return z;
}

Var softmax_rows(Var logits) {
  const Tensor& lv = logits.value();
  require_rank2(lv, "softmax_rows");
  const std::size_t rows = lv.shape[0], cols = lv.shape[1];
  Tensor out(lv.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* z = &lv.data[r * cols];
    double* y = &out.data[r * cols];
    const double mx = *std::max_element(z, z + cols);
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += (y[c] = std::exp(z[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) y[c] /= s;
  }
  Var out_var = logits.tape->record(std::move(out), logits.requires_grad(), {});
  if (!out_var.requires_grad()) return out_var;
  const std::size_t il = logits.id, iy = out_var.id;
  logits.tape->set_backward(iy, [il, iy, rows, cols](Tape& tp, std::span<const double> g) {
    const Tensor& y = tp.value(iy);
    auto& gl = tp.grad_buffer(il);
    for (std::size_t r = 0; r < rows; ++r) {
      double dotp = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dotp += g[r * cols + c] * y.data[r * cols + c];
      for (std::size_t c = 0; c < cols; ++c) gl[r * cols + c] += y.data[r * cols + c] * (g[r * cols + c] - dotp);
    }
  });
  return out_var;
}

namespace {

Var conv_common(Var x, Var kernels, Var bias, const ConvShape& s, Padding pad) {
  Tape& t = same_tape(x, kernels);
  same_tape(x, bias);
  Tensor out(Shape{s.length, s.out_channels});
  conv1d_forward(x.value().data.data(), kernels.value().data.data(), bias.value().data.data(), s, pad,
                 out.data.data());
  const bool rg = x.requires_grad() || kernels.requires_grad() || bias.requires_grad();
  Var z = t.record(std::move(out), rg, {});
  if (!z.requires_grad()) return z;
  const std::size_t ix = x.id, iw = kernels.id, ib = bias.id;
  t.set_backward(z.id, [ix, iw, ib, s, pad](Tape& tp, std::span<const double> g) {
    double* gx = tp.requires_grad(ix) ? tp.grad_buffer(ix).data() : nullptr;
    double* gw = tp.requires_grad(iw) ? tp.grad_buffer(iw).data() : nullptr;
    double* gb = tp.requires_grad(ib) ? tp.grad_buffer(ib).data() : nullptr;
    conv1d_backward(tp.value(ix).data.data(), tp.value(iw).data.data(), g.data(), s, pad, gx, gw, gb);
  });
  return z;
}

}  // namespace

Var conv1d(Var x, Var kernels, Var bias, Padding pad) {
  const Shape& xs = x.value().shape;
  const Shape& ks = kernels.value().shape;
  if (xs.rank() != 2 || ks.rank() != 3) throw ShapeError("conv1d: expected x (L, Cin) and kernels (K, Cin, Cout)");
  if (ks[0] % 2 == 0) throw InvalidArgument("conv1d: kernel size must be odd, got " + std::to_string(ks[0]));
  if (ks[1] != xs[1]) throw ShapeError("conv1d: input channels " + std::to_string(xs[1]) + " vs kernel " +
                                       std::to_string(ks[1]));
  if (bias.value().numel() != ks[2]) throw ShapeError("conv1d: bias length mismatch");
  return conv_common(x, kernels, bias, ConvShape{xs[0], ks[0], ks[1], ks[2], false}, pad);
}

Var conv1d_local(Var x, Var kernels, Var bias, std::size_t kernel, std::size_t out_channels, Padding pad) {
  const Shape& xs = x.value().shape;
  if (xs.rank() != 2) throw ShapeError("conv1d_local: expected x (L, Cin)");
  if (kernel % 2 == 0) throw InvalidArgument("conv1d_local: kernel size must be odd, got " + std::to_string(kernel));
  const ConvShape s{xs[0], kernel, xs[1], out_channels, true};
  if (kernels.value().numel() != s.length * s.kernel_block()) throw ShapeError("conv1d_local: kernel slab size mismatch");
  if (bias.value().numel() != s.length * out_channels) throw ShapeError("conv1d_local: bias slab size mismatch");
  return conv_common(x, kernels, bias, s, pad);
}

}  // namespace hyperweno::ad
