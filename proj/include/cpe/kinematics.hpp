#pragma once

#include <vector>

#include "cpe/fields.hpp"
#include "cpe/spectral.hpp"

namespace cpe {

template <class Scalar>
ArrayXX<Scalar> density(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const ArrayX<Scalar> za = state.Z.pow(state.params.alpha());
  ArrayXX<Scalar> rho(gr.nh, gr.nz);
  for (int k = 0; k < gr.nz; ++k) rho.col(k) = gr.zpow_alpha[k] * za;
  return rho;
}

// Midpoint-rule analogue of vertical_avg_weighted: int_0^1 z^a f dz as
// sum_k z_k^a dz f_k.  The surface tendency and all energy functionals use
// this rule; paired with it, the kinetic-energy weight per level is exactly
// dz, which is what closes the discrete energy and momentum budgets (see
// the notes in stepper and diagnostics).
template <class Scalar>
ArrayX<Scalar> vertical_avg_midpoint(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  ArrayX<Scalar> out = ArrayX<Scalar>::Zero(gr.nh);
  for (int k = 0; k < gr.nz; ++k) out += (gr.zpow_alpha[k] * gr.dz) * f.col(k);
  return out;
}

template <class Scalar>
ArrayXX<Scalar> horizontal_divergence(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  ArrayXX<Scalar> d = horiz_deriv(gr, state.v[0], 0);
  if (state.params.dim_h == 2) d += horiz_deriv(gr, state.v[1], 1);
  return d;
}

// Z_t = -(a+1) avg(z^a v) . grad_h Z - avg(z^a div_h v) Z
template <class Scalar>
ArrayX<Scalar> surface_tendency(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Scalar ap1 = state.params.alpha() + 1;
  ArrayX<Scalar> zt = -vertical_avg_midpoint(gr, horizontal_divergence(state)) * state.Z;
  for (int i = 0; i < state.params.dim_h; ++i)
    zt -= ap1 * vertical_avg_midpoint(gr, state.v[i]) * horiz_deriv(gr, state.Z, i);
  return zt;
}

namespace detail {

template <class Scalar>
struct WParts {
  ArrayXX<Scalar> divv;
  std::vector<ArrayX<Scalar>> gradZ;  // dim_h components
  ArrayX<Scalar> avg_div;             // quad_full . (z^a div v)
  std::vector<ArrayX<Scalar>> avg_v;  // quad_full . (z^a v_i)
  ArrayX<Scalar> G;                   // (a+1) avg_v . gradZ + avg_div Z
};

template <class Scalar>
WParts<Scalar> w_parts(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Scalar ap1 = state.params.alpha() + 1;
  WParts<Scalar> p;
  p.divv = horizontal_divergence(state);
  p.avg_div = vertical_avg_weighted(gr, p.divv);
  p.G = p.avg_div * state.Z;
  p.gradZ.resize(static_cast<size_t>(state.params.dim_h));
  p.avg_v.resize(static_cast<size_t>(state.params.dim_h));
  for (int i = 0; i < state.params.dim_h; ++i) {
    p.gradZ[i] = horiz_deriv(gr, state.Z, i);
    p.avg_v[i] = vertical_avg_weighted(gr, state.v[i]);
    p.G += ap1 * p.avg_v[i] * p.gradZ[i];
  }
  return p;
}

}  // namespace detail

// W(x, z_k) = [ z^{a+1} G - (a+1) (cum z^a v) . grad_h Z - (cum z^a div v) Z ]
//             / (z^a Z)
// The cumulative and full integrals share one weight table, so the
// numerator vanishes identically at z = 1 and scales like z^{a+1} at the
// vacuum face.
template <class Scalar>
ArrayXX<Scalar> vertical_velocity(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  if (state.Z.minCoeff() <= Scalar(0))
    throw ValidityError("vertical_velocity: surface field must stay positive");
  const Scalar ap1 = state.params.alpha() + 1;
  const auto p = detail::w_parts(state);

  ArrayXX<Scalar> num(gr.nh, gr.nz);
  const ArrayXX<Scalar> cum_div = cumulative_weighted(gr, p.divv);
  for (int k = 0; k < gr.nz; ++k)
    num.col(k) = std::pow(gr.z[k], ap1) * p.G - cum_div.col(k) * state.Z;
  for (int i = 0; i < state.params.dim_h; ++i) {
    const ArrayXX<Scalar> cum_v = cumulative_weighted(gr, state.v[i]);
    for (int k = 0; k < gr.nz; ++k) num.col(k) -= ap1 * cum_v.col(k) * p.gradZ[i];
  }
  for (int k = 0; k < gr.nz; ++k) num.col(k) /= gr.zpow_alpha[k] * state.Z;
  return num;
}

// The z = 1 value of the W numerator, with the cumulative integrals taken by
// the full-column table (round-off-level zero by construction).
template <class Scalar>
ArrayX<Scalar> w_top_numerator(const State<Scalar>& state) {
  const Scalar ap1 = state.params.alpha() + 1;
  const auto p = detail::w_parts(state);
  ArrayX<Scalar> top = p.G - p.avg_div * state.Z;
  for (int i = 0; i < state.params.dim_h; ++i) top -= ap1 * p.avg_v[i] * p.gradZ[i];
  return top;
}

// Closed form of dz(z^a W), no differencing:
// (a+1) z^a ((a+1) avg(z^a v) . grad_h log Z + avg(z^a div_h v))
//   - (a+1) z^a v . grad_h log Z - z^a div_h v
template <class Scalar>
ArrayXX<Scalar> dz_weighted_w(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Scalar ap1 = state.params.alpha() + 1;
  const auto p = detail::w_parts(state);

  ArrayX<Scalar> Gz = p.avg_div;
  for (int i = 0; i < state.params.dim_h; ++i) Gz += ap1 * p.avg_v[i] * (p.gradZ[i] / state.Z);

  ArrayXX<Scalar> out(gr.nh, gr.nz);
  for (int k = 0; k < gr.nz; ++k) {
    ArrayX<Scalar> local = p.divv.col(k);
    for (int i = 0; i < state.params.dim_h; ++i)
      local += ap1 * state.v[i].col(k) * (p.gradZ[i] / state.Z);
    out.col(k) = gr.zpow_alpha[k] * (ap1 * Gz - local);
  }
  return out;
}

}  // namespace cpe
