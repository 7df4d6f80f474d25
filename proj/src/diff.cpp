#include "hyperweno/diff.hpp"

#include <cmath>

#include "hyperweno/error.hpp"

namespace hyperweno::diff {

using ad::Var;

ad::Var pad_ghost(Var u, BoundaryCondition bc, std::size_t width) {
  const std::size_t n = u.shape().rows();
  if (width < 1 || width > n) throw InvalidArgument("pad_ghost: width must be in [1, N]");
  std::vector<std::size_t> idx(n + 2 * width);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    idx[r] = ghost_source(static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(width), n, bc);
  }
  return ad::gather_rows(u, std::move(idx));
}

namespace {

constexpr double kThirteenTwelfths = 13.0 / 12.0;

// Padded rows j..j+5 are (a, b, c, d, e, f) for interface j.
Var st(Var p, std::size_t n_if, std::vector<std::size_t> off, std::vector<double> co) {
  return ad::stencil(p, std::move(off), std::move(co), n_if);
}

struct Triple {
  Var k[3];
};

Triple candidates_minus(Var p, std::size_t n) {
  return {{st(p, n, {0, 1, 2}, {2.0 / 6.0, -7.0 / 6.0, 11.0 / 6.0}), st(p, n, {1, 2, 3}, {-1.0 / 6.0, 5.0 / 6.0, 2.0 / 6.0}),
           st(p, n, {2, 3, 4}, {2.0 / 6.0, 5.0 / 6.0, -1.0 / 6.0})}};
}

Triple candidates_plus(Var p, std::size_t n) {
  return {{st(p, n, {3, 4, 5}, {11.0 / 6.0, -7.0 / 6.0, 2.0 / 6.0}), st(p, n, {2, 3, 4}, {2.0 / 6.0, 5.0 / 6.0, -1.0 / 6.0}),
           st(p, n, {1, 2, 3}, {-1.0 / 6.0, 5.0 / 6.0, 2.0 / 6.0})}};
}

Var beta(Var p, std::size_t n, std::vector<std::size_t> off, std::vector<double> c1, std::vector<double> c2) {
  return ad::add(ad::scale(ad::square(st(p, n, off, std::move(c1))), kThirteenTwelfths),
                 ad::scale(ad::square(st(p, n, off, std::move(c2))), 0.25));
}

Triple smoothness_minus(Var p, std::size_t n) {
  return {{beta(p, n, {0, 1, 2}, {1, -2, 1}, {1, -4, 3}), beta(p, n, {1, 2, 3}, {1, -2, 1}, {1, 0, -1}),
           beta(p, n, {2, 3, 4}, {1, -2, 1}, {3, -4, 1})}};
}

Triple smoothness_plus(Var p, std::size_t n) {
  return {{beta(p, n, {3, 4, 5}, {1, -2, 1}, {3, -4, 1}), beta(p, n, {2, 3, 4}, {1, -2, 1}, {1, 0, -1}),
           beta(p, n, {1, 2, 3}, {1, -2, 1}, {1, -4, 3})}};
}

Triple classical(const Triple& b, const std::array<double, 3>& d, double eps, double power) {
  if (power != 2.0) throw InvalidArgument("differentiable classical weights support power 2 only");
  Var a[3];
  for (int k = 0; k < 3; ++k) a[k] = ad::scale(ad::reciprocal(ad::square(ad::add_scalar(b.k[k], eps))), d[k]);
  Var s = ad::add(ad::add(a[0], a[1]), a[2]);
  return {{ad::div(a[0], s), ad::div(a[1], s), ad::div(a[2], s)}};
}

// w_k columns (n x 1 or n x C) times candidate columns (n x C).
Var combine(const Triple& w, const Triple& q, std::size_t c) {
  auto bc = [&](Var x) { return x.shape().cols() == c ? x : ad::repeat_cols(x, c); };
  return ad::add(ad::add(ad::mul(bc(w.k[0]), q.k[0]), ad::mul(bc(w.k[1]), q.k[1])), ad::mul(bc(w.k[2]), q.k[2]));
}

}  // namespace

Solver::Solver(const scheme::Model& model, const ad::BoundParameters* params, const Grid& grid, BoundaryCondition bc,
               Var metadata)
    : model_(&model), params_(params), grid_(grid), bc_(bc) {
  if ((model.learned_weights() || model.learned_flux()) && params == nullptr) {
    throw InvalidArgument("diff::Solver: learned scheme needs bound parameters");
  }
  if (model.learned_weights()) slab_ = networks::hypernet_forward(model.hyper, *params, metadata, bc);
}

Var Solver::rusanov(Var um, Var up) const {
  const physics::SystemSpec& sys = model_->system;
  const std::size_t c = sys.n_components();
  auto col = [](Var x, std::size_t k) { return ad::slice_cols(x, k, k + 1); };
  Var fm, fp, alpha;
  switch (sys.kind) {
    case physics::SystemKind::Burgers: {
      fm = ad::scale(ad::square(um), 0.5);
      fp = ad::scale(ad::square(up), 0.5);
      alpha = ad::maximum(ad::abs(um), ad::abs(up));
      break;
    }
    case physics::SystemKind::ShallowWater: {
      auto flux_speed = [&](Var u, Var& f, Var& s) {
        Var h = col(u, 0), hv = col(u, 1);
        for (double v : h.value().data)
          if (!(v > 0.0)) throw NonPhysicalState("non-positive depth in differentiable step");
        Var vel = ad::div(hv, h);
        const Var parts[2] = {hv, ad::add(ad::mul(hv, vel), ad::scale(ad::square(h), 0.5 * sys.g))};
        f = ad::concat_cols(parts);
        s = ad::add(ad::abs(vel), ad::sqrt(ad::scale(h, sys.g)));
      };
      Var sm, sp;
      flux_speed(um, fm, sm);
      flux_speed(up, fp, sp);
      alpha = ad::maximum(sm, sp);
      break;
    }
    case physics::SystemKind::Euler: {
      auto flux_speed = [&](Var u, Var& f, Var& s) {
        Var rho = col(u, 0), mom = col(u, 1), en = col(u, 2);
        for (double v : rho.value().data)
          if (!(v > 0.0)) throw NonPhysicalState("non-positive density in differentiable step");
        Var vel = ad::div(mom, rho);
        Var p = ad::scale(ad::sub(en, ad::scale(ad::mul(mom, vel), 0.5)), sys.gamma - 1.0);
        for (double v : p.value().data)
          if (!(v > 0.0)) throw NonPhysicalState("non-positive pressure in differentiable step");
        const Var parts[3] = {mom, ad::add(ad::mul(mom, vel), p), ad::mul(vel, ad::add(en, p))};
        f = ad::concat_cols(parts);
        s = ad::add(ad::abs(vel), ad::sqrt(ad::div(ad::scale(p, sys.gamma), rho)));
      };
      Var sm, sp;
      flux_speed(um, fm, sm);
      flux_speed(up, fp, sp);
      alpha = ad::maximum(sm, sp);
      break;
    }
  }
  if (c > 1) alpha = ad::repeat_cols(alpha, c);
  return ad::scale(ad::sub(ad::add(fm, fp), ad::mul(alpha, ad::sub(up, um))), 0.5);
}

Solver::Rhs Solver::rhs(Var u) const {
  const std::size_t n = grid_.n_cells, c = model_->system.n_components();
  if (u.shape().rows() != n || u.shape().cols() != c) throw ShapeError("diff::Solver::rhs: state shape mismatch");
  Var p = pad_ghost(u, bc_, weno::kGhostWidth);
  const std::size_t n_if = n + 1;
  const Triple qm = candidates_minus(p, n_if), qp = candidates_plus(p, n_if);

  Triple wm, wp;
  switch (model_->kind) {
    case scheme::SchemeKind::Classical: {
      const weno::WenoConfig& cfg = model_->weno;
      wm = classical(smoothness_minus(p, n_if), cfg.d_minus, cfg.epsilon, cfg.power);
      wp = classical(smoothness_plus(p, n_if), cfg.d_plus, cfg.epsilon, cfg.power);
      break;
    }
    case scheme::SchemeKind::Linear: {
      for (int k = 0; k < 3; ++k) {
        wm.k[k] = u.tape->constant(ad::Tensor(ad::Shape{n_if, 1}, model_->weno.d_minus[k]));
        wp.k[k] = u.tape->constant(ad::Tensor(ad::Shape{n_if, 1}, model_->weno.d_plus[k]));
      }
      break;
    }
    case scheme::SchemeKind::HyperCfcnn:
    case scheme::SchemeKind::HyperCfcnnF: {
      Var eta = networks::targetnet_forward(model_->hyper.target, slab_, u, bc_);
      std::vector<std::size_t> rows(n_if);
      for (std::size_t j = 0; j < n_if; ++j) rows[j] = networks::logit_row(j, n, bc_);
      eta = ad::gather_rows(eta, std::move(rows));
      Var sm = ad::softmax_rows(ad::slice_cols(eta, 0, 3));
      Var sp = ad::softmax_rows(ad::slice_cols(eta, 3, 6));
      for (std::size_t k = 0; k < 3; ++k) {
        wm.k[k] = ad::slice_cols(sm, k, k + 1);
        wp.k[k] = ad::slice_cols(sp, k, k + 1);
      }
      break;
    }
  }
  Var um = combine(wm, qm, c), up = combine(wp, qp, c);

  Var f = model_->learned_flux() ? networks::fluxnet_forward(model_->flux, *params_, um, up, bc_) : rusanov(um, up);
  if (bc_ == BoundaryCondition::Periodic) {
    const Var parts[2] = {ad::slice_rows(f, n, n + 1), ad::slice_rows(f, 1, n + 1)};
    f = ad::concat_rows(parts);
  }
  Var dudt = ad::scale(ad::sub(ad::slice_rows(f, 1, n + 1), ad::slice_rows(f, 0, n)), -1.0 / grid_.dx);
  return {dudt, f};
}

Var Solver::step(Var u, double dt) const {
  Var u1 = ad::add(u, ad::scale(rhs(u).dudt, dt));
  Var u2 = ad::add(ad::scale(u, 0.75), ad::scale(ad::add(u1, ad::scale(rhs(u1).dudt, dt)), 0.25));
  return ad::add(ad::scale(u, 1.0 / 3.0), ad::scale(ad::add(u2, ad::scale(rhs(u2).dudt, dt)), 2.0 / 3.0));
}

}  // namespace hyperweno::diff
