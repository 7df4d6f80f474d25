#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyperweno/autodiff/conv.hpp"
#include "hyperweno/autodiff/tape.hpp"

namespace hyperweno::ad {

// Elementwise binary ops take equal shapes, or one operand with a single
// element which is broadcast.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var maximum(Var a, Var b);  // subgradient goes to `a` on ties

Var neg(Var a);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var square(Var a);
Var tanh(Var a);
Var exp(Var a);
Var sqrt(Var a);
Var abs(Var a);
Var reciprocal(Var a);

Var reduce_sum(Var a);
Var reduce_mean(Var a);

// Rank-2 slicing and assembly.
Var slice_rows(Var a, std::size_t begin, std::size_t end);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
// out row r = a row index[r]; backward scatters with accumulation.
Var gather_rows(Var a, std::vector<std::size_t> index);
// n x 1 -> n x c by copying the column.
Var repeat_cols(Var a, std::size_t c);
Var reshape(Var a, Shape shape);

// out(j, :) = sum_m coeffs[m] * a(j + offsets[m], :), j in [0, n_out).
Var stencil(Var a, std::vector<std::size_t> offsets, std::vector<double> coeffs, std::size_t n_out);

// Row-wise softmax with max subtraction.
Var softmax_rows(Var logits);

// x: L x Cin, kernels: K x Cin x Cout, bias: Cout.
Var conv1d(Var x, Var kernels, Var bias, Padding pad);

// x: L x Cin, kernels: L x (K * Cin * Cout), bias: L x Cout.
Var conv1d_local(Var x, Var kernels, Var bias, std::size_t kernel, std::size_t out_channels, Padding pad);

}  // namespace hyperweno::ad
