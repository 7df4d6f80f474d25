#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hyperweno/autodiff/gradcheck.hpp"
#include "hyperweno/error.hpp"
#include "hyperweno/io.hpp"
#include "hyperweno/networks.hpp"
#include "support.hpp"

using namespace hyperweno;
using namespace hyperweno::networks;

namespace {

HyperNetConfig small_hyper(std::size_t c = 1) {
  HyperNetConfig h;
  h.layers = 3;
  h.channels = 8;
  h.target.n_components = c;
  return h;
}

}  // namespace

TEST_CASE("per-cell parameter counts") {
  TargetNetConfig t;
  CHECK(t.p_cell() == 78);
  t.n_components = 2;
  CHECK(t.p_cell() == 108);
  t.n_components = 3;
  CHECK(t.p_cell() == 138);
}

TEST_CASE("metadata channels") {
  const Grid g = make_grid(0.0, 1.0, 8);
  const Field u0 = testing_support::random_field(8, 2, 1);
  const Field m = build_metadata(g, u0);
  REQUIRE(m.cols() == 4);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(m(i, 0) == 0.125);
    CHECK(m(i, 2) == u0(i, 0));
    CHECK(m(i, 3) == u0(i, 1));
  }
  CHECK(m(0, 1) == doctest::Approx(-1.0 + 0.125).epsilon(1e-15));
  CHECK(m(7, 1) == doctest::Approx(1.0 - 0.125).epsilon(1e-15));
  CHECK_THROWS_AS(build_metadata(g, Field(9, 1)), ShapeError);
}

TEST_CASE("fresh hypernetwork generates the optimal linear weights at every cell") {
  for (std::size_t c : {1u, 2u, 3u}) {
    HyperNetConfig h;
    h.target.n_components = c;
    ad::ParameterStore p;
    init_hypernet(h, {}, 7, p);
    const Grid g = make_grid(0.0, 2.0, 32);
    const Field meta = build_metadata(g, testing_support::random_field(32, c, 2));
    for (auto bc : {BoundaryCondition::Periodic, BoundaryCondition::NoFlux}) {
      const Field slab = hypernet_forward(h, p, meta, bc);
      CHECK(slab.rows() == 32);
      CHECK(slab.cols() == h.target.p_cell());
      const TargetNetParams tp = split_slab(h.target, slab);
      const Field eta = targetnet_forward(tp, testing_support::random_field(32, c, 3), bc);
      const weno::WenoWeights w = logits_to_weights(eta, bc);
      for (std::size_t j = 0; j <= 32; ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
          CHECK(std::abs(w.rows.minus[j * 3 + k] - weno::kLinearWeightsMinus[k]) <= 1e-15);
          CHECK(std::abs(w.rows.plus[j * 3 + k] - weno::kLinearWeightsPlus[k]) <= 1e-15);
        }
      }
    }
  }
}

TEST_CASE("target parameter count is linear in N") {
  HyperNetConfig h = small_hyper();
  ad::ParameterStore p;
  init_hypernet(h, {}, 1, p);
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    const Grid g = make_grid(0.0, 1.0, n);
    const TargetNetParams tp =
        split_slab(h.target, hypernet_forward(h, p, build_metadata(g, Field(n, 1, 0.5)), BoundaryCondition::Periodic));
    CHECK(tp.total() == n * 78);
    CHECK(tp.w1.size() + tp.b1.size() + tp.w2.size() + tp.b2.size() == n * 78);
  }
}

TEST_CASE("periodic hypernetwork is shift-equivariant") {
  HyperNetConfig h = small_hyper();
  ad::ParameterStore p;
  init_hypernet(h, {}, 3, p);
  // Non-neutral final layer so the output actually varies across cells.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  for (double& v : p.at(weight_name(kHyperPrefix, 2)).data) v = d(rng);
  const std::size_t n = 16;
  const Field meta = testing_support::random_field(n, 3, 5);
  const Field a = hypernet_forward(h, p, meta, BoundaryCondition::Periodic);
  for (std::size_t s : {1u, 5u}) {
    Field shifted(n, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 3; ++c) shifted(i, c) = meta((i + s) % n, c);
    const Field b = hypernet_forward(h, p, shifted, BoundaryCondition::Periodic);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < b.cols(); ++c) CHECK(std::abs(b(i, c) - a((i + s) % n, c)) <= 1e-13);
  }
}

TEST_CASE("target net: zero weights give the bias, shapes, N mismatch") {
  TargetNetConfig t;
  for (std::size_t n : {8u, 13u}) {
    Field slab(n, t.p_cell());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 6; ++k) slab(i, t.b2_offset() + k) = 0.1 * static_cast<double>(k) - 0.2;
    const TargetNetParams tp = split_slab(t, slab);
    const Field eta = targetnet_forward(tp, testing_support::random_field(n, 1, 1), BoundaryCondition::NoFlux);
    CHECK(eta.rows() == n);
    CHECK(eta.cols() == 6);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 6; ++k) CHECK(eta(i, k) == slab(i, t.b2_offset() + k));
    CHECK_THROWS_AS(targetnet_forward(tp, Field(n + 1, 1), BoundaryCondition::NoFlux), ShapeError);
  }
}

TEST_CASE("target net logits: finite-difference gradient against per-cell weights") {
  TargetNetConfig t;
  const std::size_t n = 10;
  const Field slab0 = testing_support::random_field(n, t.p_cell(), 8);
  const Field u = testing_support::random_field(n, 1, 9);
  for (auto bc : {BoundaryCondition::Periodic, BoundaryCondition::NoFlux}) {
    ad::Tape tape;
    ad::Var s = tape.leaf(ad::Tensor(ad::Shape{n, t.p_cell()}, slab0.values()));
    ad::Var eta = targetnet_forward(t, s, tape.constant(ad::Tensor(ad::Shape{n, 1}, u.values())), bc);
    // One logit: cell 0, column 4 (depends on ghost-padded neighbors too).
    tape.backward(ad::slice_cols(ad::slice_rows(eta, 0, 1), 4, 5));
    const auto g = tape.grad(s);
    auto f = [&](const std::vector<double>& x) {
      return targetnet_forward(split_slab(t, Field(n, t.p_cell(), x)), u, bc)(0, 4);
    };
    const auto r = ad::check_gradient(f, slab0.values(), g, 1e-6, 1e-10);
    CHECK(r.max_rel_error < 1e-5);
    CHECK(r.n_checked > 20);
  }
}

TEST_CASE("fast and tape forward passes agree") {
  HyperNetConfig h = small_hyper(2);
  ad::ParameterStore p;
  init_hypernet(h, {}, 11, p);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  for (double& v : p.at(weight_name(kHyperPrefix, 2)).data) v = d(rng);
  FluxNetConfig fc;
  fc.n_components = 2;
  init_fluxnet(fc, 13, p);
  for (double& v : p.at(weight_name(kFluxPrefix, 3)).data) v = d(rng);
  const std::size_t n = 12;
  const Field meta = testing_support::random_field(n, 4, 14);
  const Field um = testing_support::random_field(n + 1, 2, 15), up = testing_support::random_field(n + 1, 2, 16);
  for (auto bc : {BoundaryCondition::Periodic, BoundaryCondition::NoFlux}) {
    ad::Tape t;
    ad::BoundParameters bp(t, p, p.names(), false);
    const Field slab = hypernet_forward(h, p, meta, bc);
    ad::Var vs = hypernet_forward(h, bp, t.constant(ad::Tensor(ad::Shape{n, 4}, meta.values())), bc);
    for (std::size_t i = 0; i < slab.size(); ++i) CHECK(std::abs(vs.value().data[i] - slab.values()[i]) <= 1e-14);
    const Field fl = fluxnet_forward(fc, p, um, up, bc);
    ad::Var vf = fluxnet_forward(fc, bp, t.constant(ad::Tensor(ad::Shape{n + 1, 2}, um.values())),
                                 t.constant(ad::Tensor(ad::Shape{n + 1, 2}, up.values())), bc);
    REQUIRE(vf.value().numel() == fl.size());
    for (std::size_t i = 0; i < fl.size(); ++i) CHECK(std::abs(vf.value().data[i] - fl.values()[i]) <= 1e-14);
    if (bc == BoundaryCondition::Periodic) CHECK(fl.row(0)[1] == fl.row(n)[1]);
  }
}

TEST_CASE("fluxnet: zero final layer, pointwise locality, shift equivariance") {
  FluxNetConfig fc;
  ad::ParameterStore p;
  init_fluxnet(fc, 1, p);
  const std::size_t n = 16;
  const Field um = testing_support::random_field(n + 1, 1, 2), up = testing_support::random_field(n + 1, 1, 3);
  const Field zero = fluxnet_forward(fc, p, um, up, BoundaryCondition::NoFlux);
  for (double v : zero.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  for (double& v : p.at(weight_name(kFluxPrefix, 3)).data) v = d(rng);
  p.at(bias_name(kFluxPrefix, 3)).data[0] = 0.25;

  FluxNetConfig pw = fc;
  pw.kernel = 1;
  ad::ParameterStore q;
  init_fluxnet(pw, 5, q);
  for (double& v : q.at(weight_name(kFluxPrefix, 3)).data) v = d(rng);
  const Field base = fluxnet_forward(pw, q, um, up, BoundaryCondition::NoFlux);
  Field um2 = um;
  um2(7, 0) += 0.3;
  const Field changed = fluxnet_forward(pw, q, um2, up, BoundaryCondition::NoFlux);
  for (std::size_t j = 0; j <= n; ++j) {
    if (j == 7) CHECK(changed(j, 0) != base(j, 0));
    else CHECK(changed(j, 0) == base(j, 0));
  }

  // Periodic: the N distinct interfaces are rows 1..N; shift them cyclically.
  const Field a = fluxnet_forward(fc, p, um, up, BoundaryCondition::Periodic);
  Field sm(n + 1, 1), sp(n + 1, 1);
  const std::size_t s = 3;
  for (std::size_t j = 1; j <= n; ++j) {
    sm(j, 0) = um(1 + (j - 1 + s) % n, 0);
    sp(j, 0) = up(1 + (j - 1 + s) % n, 0);
  }
  sm(0, 0) = sm(n, 0);
  sp(0, 0) = sp(n, 0);
  const Field b = fluxnet_forward(fc, p, sm, sp, BoundaryCondition::Periodic);
  for (std::size_t j = 1; j <= n; ++j) CHECK(std::abs(b(j, 0) - a(1 + (j - 1 + s) % n, 0)) <= 1e-13);
}

TEST_CASE("initialization is deterministic per seed") {
  HyperNetConfig h = small_hyper();
  ad::ParameterStore a, b, c;
  init_hypernet(h, {}, 42, a);
  init_hypernet(h, {}, 42, b);
  init_hypernet(h, {}, 43, c);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("checkpoint round-trip and corruption") {
  HyperNetConfig h = small_hyper();
  ad::ParameterStore p;
  init_hypernet(h, {}, 5, p);
  init_fluxnet({}, 5, p);
  p.set("scalar", ad::Tensor::scalar(-0.0));
  const auto path = std::filesystem::temp_directory_path() / "hyperweno_ckpt_test.bin";
  save_checkpoint(path, p);
  const ad::ParameterStore q = load_checkpoint(path);
  CHECK(q == p);
  CHECK(std::signbit(q.at("scalar").item()));
  std::filesystem::remove(path);

  const std::string bytes = encode_checkpoint(p);
  CHECK(bytes.substr(0, 5) == "HWCK1");
  try {
    decode_checkpoint("HWCK2" + bytes.substr(5));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
  try {
    decode_checkpoint(bytes.substr(0, bytes.size() - 3));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == bytes.size() - 8);
  }
  try {
    decode_checkpoint(bytes + "x");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == bytes.size());
  }
  // Absurd dimension in the first entry.
  std::string bad = bytes;
  const std::size_t name_len = static_cast<unsigned char>(bad[9]);
  const std::size_t dim_at = 5 + 4 + 4 + name_len + 4;
  bad[dim_at + 7] = '\x7f';
  CHECK_THROWS_AS(decode_checkpoint(bad), FormatError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/ckpt.bin"), IoError);
}
