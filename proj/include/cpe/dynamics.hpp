#pragma once

#include "cpe/kinematics.hpp"
#include "cpe/vertical.hpp"

namespace cpe {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <class Scalar>
using Velocity = std::vector<ArrayXX<Scalar>>;

// Linear viscous operator treated implicitly by the IMEX steppers.
// Conservative variant: mu (lap_h + dzz) v_i + (mu+lambda) d_i(div_h v).
// Non-conservative variant (constant viscosity, no grad-div coupling):
// mu (lap_h + dzz) v_i.
template <class Scalar>
Velocity<Scalar> viscous_linear(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Scalar mu = state.params.mu;
  Velocity<Scalar> out(state.v.size());
  for (int i = 0; i < state.params.dim_h; ++i) {
    ArrayXX<Scalar> lap = horiz_deriv(gr, horiz_deriv(gr, state.v[i], 0), 0);
    if (state.params.dim_h == 2) lap += horiz_deriv(gr, horiz_deriv(gr, state.v[i], 1), 1);
    out[i] = mu * (lap + dzz_mirror(gr, state.v[i]));
  }
  if (state.params.variant == Variant::conservative) {
    const ArrayXX<Scalar> divv = horizontal_divergence(state);
    const Scalar mul = state.params.mu + state.params.lambda;
    for (int i = 0; i < state.params.dim_h; ++i) out[i] += mul * horiz_deriv(gr, divv, i);
  }
  return out;
}

// Everything the steppers treat explicitly, premultiplied by the mass weight
// z^a Z^a: the momentum-correction terms (conservative variant only),
// advection, vertical transport, and the pressure gradient.
template <class Scalar>
Velocity<Scalar> explicit_weighted(const State<Scalar>& state, const ArrayXX<Scalar>& W) {
  const Grid<Scalar>& gr = *state.grid;
  const Params<Scalar>& pr = state.params;
  const int d = pr.dim_h;
  const ArrayX<Scalar> za = state.Z.pow(pr.alpha());

  std::vector<ArrayX<Scalar>> gradZ(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) gradZ[i] = horiz_deriv(gr, state.Z, i);

  std::vector<std::vector<ArrayXX<Scalar>>> grad_v(static_cast<size_t>(d));
  std::vector<ArrayXX<Scalar>> dz_v(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    grad_v[i].resize(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) grad_v[i][j] = horiz_deriv(gr, state.v[i], j);
    dz_v[i] = dz_centered(gr, state.v[i]);
  }

  Velocity<Scalar> out(static_cast<size_t>(d));
  const bool corrections = pr.variant == Variant::conservative;
  ArrayXX<Scalar> divv;
  if (corrections) {
    divv = grad_v[0][0];
    if (d == 2) divv += grad_v[1][1];
  }
  for (int i = 0; i < d; ++i) {
    ArrayXX<Scalar> acc = ArrayXX<Scalar>::Zero(gr.nh, gr.nz);
    if (corrections) {
      const Scalar mul = pr.mu + pr.lambda;
      for (int j = 0; j < d; ++j) {
        const ArrayX<Scalar> glz = gradZ[j] / state.Z;
        for (int k = 0; k < gr.nz; ++k) acc.col(k) += pr.mu * glz * grad_v[i][j].col(k);
      }
      const ArrayX<Scalar> glz_i = gradZ[i] / state.Z;
      for (int k = 0; k < gr.nz; ++k) acc.col(k) += mul * glz_i * divv.col(k);
    }
    for (int k = 0; k < gr.nz; ++k) {
      ArrayX<Scalar> transport = W.col(k) * dz_v[i].col(k) + gradZ[i] * pr.g;
      for (int j = 0; j < d; ++j) transport += state.v[j].col(k) * grad_v[i][j].col(k);
      acc.col(k) -= (gr.zpow_alpha[k] * za) * transport;
    }
    out[i] = std::move(acc);
  }
  return out;
}

namespace detail {

template <class Scalar>
Velocity<Scalar> assemble_rhs(const State<Scalar>& state, const ArrayXX<Scalar>& W) {
  const Grid<Scalar>& gr = *state.grid;
  const ArrayX<Scalar> za = state.Z.pow(state.params.alpha());
  Velocity<Scalar> rhs = viscous_linear(state);
  const Velocity<Scalar> expl = explicit_weighted(state, W);
  for (int i = 0; i < state.params.dim_h; ++i) {
    rhs[i] += expl[i];
    for (int k = 0; k < gr.nz; ++k) rhs[i].col(k) /= gr.zpow_alpha[k] * za;
  }
  return rhs;
}

}  // namespace detail

template <class Scalar>
Velocity<Scalar> momentum_rhs_conservative(const State<Scalar>& state, const ArrayXX<Scalar>& W) {
  State<Scalar> s = state;
  s.params.variant = Variant::conservative;
  return detail::assemble_rhs(s, W);
}

template <class Scalar>
Velocity<Scalar> momentum_rhs_nonconservative(const State<Scalar>& state,
                                              const ArrayXX<Scalar>& W) {
  State<Scalar> s = state;
  s.params.variant = Variant::nonconservative;
  return detail::assemble_rhs(s, W);
}

// v_t of the variant the state is configured with.
template <class Scalar>
Velocity<Scalar> velocity_tendency(const State<Scalar>& state, const ArrayXX<Scalar>& W) {
  return detail::assemble_rhs(state, W);
}

namespace detail {

// int z^a Z^{a+1} v dx by the midpoint rule shared with the energy
// functionals (exact closure of the discrete momentum budget).
template <class Scalar>
Vec2<Scalar> weighted_momentum(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const ArrayX<Scalar> w = state.Z.pow(state.params.alpha() + 1);
  Vec2<Scalar> m = Vec2<Scalar>::Zero();
  for (int i = 0; i < state.params.dim_h; ++i) {
    Scalar acc = 0;
    for (int k = 0; k < gr.nz; ++k)
      acc += gr.zpow_alpha[k] * gr.dz * (w * state.v[i].col(k)).sum();
    m[i] = acc / Scalar(gr.nh);
  }
  return m;
}

}  // namespace detail

// delta(t) = (a+1) int z^a Z^{a+1} v dx, the drift functional of the
// non-conservative system.
template <class Scalar>
Vec2<Scalar> delta(const State<Scalar>& state) {
  return (state.params.alpha() + 1) * detail::weighted_momentum(state);
}

// delta'(t) = -(a+1) mu int (grad_h Z . grad_h) v dx.  The viscosity factor
// follows the constant-viscosity momentum equation scaled by mu.
template <class Scalar>
Vec2<Scalar> delta_rate(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const int d = state.params.dim_h;
  std::vector<ArrayX<Scalar>> gradZ(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) gradZ[j] = horiz_deriv(gr, state.Z, j);
  Vec2<Scalar> r = Vec2<Scalar>::Zero();
  for (int i = 0; i < d; ++i) {
    Scalar acc = 0;
    for (int j = 0; j < d; ++j) {
      const ArrayXX<Scalar> dv = horiz_deriv(gr, state.v[i], j);
      for (int k = 0; k < gr.nz; ++k) acc += gr.dz * (gradZ[j] * dv.col(k)).sum();
    }
    r[i] = -(state.params.alpha() + 1) * state.params.mu * acc / Scalar(gr.nh);
  }
  return r;
}

}  // namespace cpe
