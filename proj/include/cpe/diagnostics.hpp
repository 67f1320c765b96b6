#pragma once

#include <cmath>
#include <vector>

#include "cpe/dynamics.hpp"
#include "cpe/vertical.hpp"

namespace cpe {

template <class Scalar>
struct DiagRecord {
  Scalar t = 0;
  Scalar mass = 0;
  Scalar mom_x = 0, mom_y = 0;
  Scalar e_basic = 0, d_basic = 0;
  Scalar e_total = 0, e_rel = 0, d_rel = 0;
  Scalar delta_x = 0, delta_y = 0;
  Scalar zmin = 0, zmax = 0;
};

namespace detail {

// int f^2 over the slab with per-level weights wz, horizontal mean measure.
template <class Scalar>
Scalar sq_integral(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f,
                   const ArrayX<Scalar>& wz) {
  Scalar acc = 0;
  for (int k = 0; k < gr.nz; ++k) acc += wz[k] * f.col(k).square().sum();
  return acc / Scalar(gr.nh);
}

// Same with an additional horizontal weight field.
template <class Scalar>
Scalar sq_integral(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f,
                   const ArrayX<Scalar>& wz, const ArrayX<Scalar>& wh) {
  Scalar acc = 0;
  for (int k = 0; k < gr.nz; ++k) acc += wz[k] * (wh * f.col(k).square()).sum();
  return acc / Scalar(gr.nh);
}

template <class Scalar>
ArrayX<Scalar> level_weights_plain(const Grid<Scalar>& gr) {
  return ArrayX<Scalar>::Constant(gr.nz, gr.dz);
}

template <class Scalar>
ArrayX<Scalar> level_weights_alpha(const Grid<Scalar>& gr) {
  return gr.zpow_alpha * gr.dz;
}

// All first and second derivatives of one volume field, vertical direction
// included (mirror ghosts, consistent with the even extension of v).
template <class Scalar>
struct Jet2 {
  std::vector<ArrayXX<Scalar>> d1h;   // per horizontal axis
  ArrayXX<Scalar> d1z;
  std::vector<ArrayXX<Scalar>> d2hh;  // (0,0), [(0,1), (1,1)]
  std::vector<ArrayXX<Scalar>> d2hz;  // per horizontal axis
  ArrayXX<Scalar> d2zz;
};

template <class Scalar>
Jet2<Scalar> jet2(const State<Scalar>& s, const ArrayXX<Scalar>& f) {
  const Grid<Scalar>& gr = *s.grid;
  const int d = s.params.dim_h;
  Jet2<Scalar> j;
  j.d1h.resize(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) j.d1h[a] = horiz_deriv(gr, f, a);
  j.d1z = dz_centered(gr, f);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) j.d2hh.push_back(horiz_deriv(gr, j.d1h[a], b));
  j.d2hz.resize(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) j.d2hz[a] = horiz_deriv(gr, j.d1z, a);
  j.d2zz = dzz_mirror(gr, f);
  return j;
}

// |grad_h^2 f|^2 summed over ordered index pairs (mixed terms twice).
template <class Scalar>
Scalar sq_d2h(const Grid<Scalar>& gr, const Jet2<Scalar>& j, const ArrayX<Scalar>& wz,
              const ArrayX<Scalar>* wh = nullptr) {
  const int d = static_cast<int>(j.d1h.size());
  Scalar acc = 0;
  int idx = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b, ++idx) {
      const Scalar mult = (a == b) ? Scalar(1) : Scalar(2);
      acc += mult * (wh ? sq_integral(gr, j.d2hh[static_cast<size_t>(idx)], wz, *wh)
                        : sq_integral(gr, j.d2hh[static_cast<size_t>(idx)], wz));
    }
  return acc;
}

// |grad f|^2 with the full gradient.
template <class Scalar>
Scalar sq_d1(const Grid<Scalar>& gr, const Jet2<Scalar>& j, const ArrayX<Scalar>& wz,
             const ArrayX<Scalar>* wh = nullptr) {
  Scalar acc = wh ? sq_integral(gr, j.d1z, wz, *wh) : sq_integral(gr, j.d1z, wz);
  for (const auto& g : j.d1h)
    acc += wh ? sq_integral(gr, g, wz, *wh) : sq_integral(gr, g, wz);
  return acc;
}

// |grad^2 f|^2 over ordered pairs drawn from all directions.
template <class Scalar>
Scalar sq_d2(const Grid<Scalar>& gr, const Jet2<Scalar>& j, const ArrayX<Scalar>& wz,
             const ArrayX<Scalar>* wh = nullptr) {
  Scalar acc = sq_d2h(gr, j, wz, wh);
  for (const auto& g : j.d2hz)
    acc += 2 * (wh ? sq_integral(gr, g, wz, *wh) : sq_integral(gr, g, wz));
  acc += wh ? sq_integral(gr, j.d2zz, wz, *wh) : sq_integral(gr, j.d2zz, wz);
  return acc;
}

}  // namespace detail

template <class Scalar>
Scalar mass(const State<Scalar>& state) {
  return state.Z.pow(state.params.alpha() + 1).sum() / Scalar(state.grid->nh);
}

template <class Scalar>
Vec2<Scalar> momentum(const State<Scalar>& state) {
  return detail::weighted_momentum(state);
}

template <class Scalar>
Scalar basic_energy(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Scalar a = state.params.alpha();
  const ArrayX<Scalar> wh = state.Z.pow(a + 1);
  const ArrayX<Scalar> wz = detail::level_weights_alpha(gr);
  Scalar kin = 0;
  for (const auto& comp : state.v) kin += detail::sq_integral(gr, comp, wz, wh);
  // expm1/log1p keeps the O((Z-1)^2) remainder of the two nearly cancelling
  // power deviations above roundoff for Z near 1
  Scalar pot_sum = 0;
  for (int x = 0; x < gr.nh; ++x) {
    const Scalar l = std::log1p(state.Z[x] - 1);
    pot_sum += std::expm1((a + 2) * l) - (a + 2) / (a + 1) * std::expm1((a + 1) * l);
  }
  const Scalar pot = state.params.g / (a + 2) * pot_sum / Scalar(gr.nh);
  return kin / 2 + pot;
}

template <class Scalar>
Scalar basic_dissipation(const State<Scalar>& state) {
  const Grid<Scalar>& gr = *state.grid;
  const Params<Scalar>& pr = state.params;
  const int d = pr.dim_h;
  const ArrayX<Scalar> wz = detail::level_weights_plain(gr);
  Scalar acc = 0;
  ArrayXX<Scalar> divv;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ArrayXX<Scalar> g = horiz_deriv(gr, state.v[i], j);
      acc += pr.mu * detail::sq_integral(gr, g, wz, state.Z);
      if (i == j) divv = (i == 0) ? std::move(g) : ArrayXX<Scalar>(divv + g);
    }
  }
  acc += (pr.mu + pr.lambda) * detail::sq_integral(gr, divv, wz, state.Z);
  // vertical part on cell faces, matching the telescoping of the discrete
  // vertical viscous operator
  for (const auto& comp : state.v) {
    Scalar vert = 0;
    for (int k = 0; k + 1 < gr.nz; ++k) {
      const ArrayX<Scalar> diff = (comp.col(k + 1) - comp.col(k)) / gr.dz;
      vert += gr.dz * (state.Z * diff.square()).sum();
    }
    acc += pr.mu * vert / Scalar(gr.nh);
  }
  return acc;
}

// Squared norm bundle: weighted H^2-in-horizontal of v, weighted L^2 of v_t,
// weighted H^1-in-horizontal of v_z, plain H^1 of v, H^2 of Z - 1, L^2 of Z_t.
template <class Scalar>
Scalar total_energy(const State<Scalar>& state, const Velocity<Scalar>& v_t,
                    const ArrayX<Scalar>& Z_t) {
  const Grid<Scalar>& gr = *state.grid;
  const int d = state.params.dim_h;
  const ArrayX<Scalar> wa = detail::level_weights_alpha(gr);
  const ArrayX<Scalar> wp = detail::level_weights_plain(gr);
  Scalar acc = 0;
  for (int i = 0; i < d; ++i) {
    const auto j = detail::jet2(state, state.v[i]);
    acc += detail::sq_integral(gr, state.v[i], wa);
    for (const auto& g : j.d1h) acc += detail::sq_integral(gr, g, wa);
    acc += detail::sq_d2h(gr, j, wa);
    acc += detail::sq_integral(gr, v_t[i], wa);
    acc += detail::sq_integral(gr, j.d1z, wa);
    for (const auto& g : j.d2hz) acc += detail::sq_integral(gr, g, wa);
    acc += detail::sq_integral(gr, state.v[i], wp);
    acc += detail::sq_d1(gr, j, wp);
  }
  ArrayX<Scalar> zm1 = state.Z - 1;
  acc += zm1.square().sum() / Scalar(gr.nh);
  for (int a = 0; a < d; ++a) {
    const ArrayX<Scalar> g1 = horiz_deriv(gr, state.Z, a);
    acc += g1.square().sum() / Scalar(gr.nh);
    for (int b = a; b < d; ++b) {
      const Scalar mult = (a == b) ? Scalar(1) : Scalar(2);
      acc += mult * horiz_deriv(gr, g1, b).square().sum() / Scalar(gr.nh);
    }
  }
  acc += Z_t.square().sum() / Scalar(gr.nh);
  return acc;
}

// Corrected relative energy: the basic energy, a small multiple of the
// viscous quadratic form with its pressure coupling, the weighted
// second-order kinetic block, and the surface block.
template <class Scalar>
Scalar relative_energy(const State<Scalar>& state, const Velocity<Scalar>& v_t,
                       const ArrayX<Scalar>& Z_t) {
  const Grid<Scalar>& gr = *state.grid;
  const Params<Scalar>& pr = state.params;
  const int d = pr.dim_h;
  const Scalar a = pr.alpha();
  const Scalar c = pr.mu / (8 * pr.g);
  const ArrayX<Scalar> wa = detail::level_weights_alpha(gr);
  const ArrayX<Scalar> wp = detail::level_weights_plain(gr);
  const ArrayX<Scalar> wh = state.Z.pow(a + 1);

  Scalar acc = basic_energy(state);

  std::vector<detail::Jet2<Scalar>> jets;
  jets.reserve(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) jets.push_back(detail::jet2(state, state.v[i]));
  ArrayXX<Scalar> divv = jets[0].d1h[0];
  if (d == 2) divv += jets[1].d1h[1];

  Scalar quad = 0;
  for (int i = 0; i < d; ++i) {
    for (const auto& g : jets[static_cast<size_t>(i)].d1h)
      quad += pr.mu / 2 * detail::sq_integral(gr, g, wp);
    quad += pr.mu / 2 * detail::sq_integral(gr, jets[static_cast<size_t>(i)].d1z, wp);
  }
  quad += (pr.mu + pr.lambda) / 2 * detail::sq_integral(gr, divv, wp);
  const ArrayX<Scalar> zp = state.Z.pow(a + 1) - 1;
  Scalar couple = 0;
  for (int k = 0; k < gr.nz; ++k) couple += wa[k] * (zp * divv.col(k)).sum();
  quad -= pr.g / (a + 1) * couple / Scalar(gr.nh);
  acc += c * quad;

  Scalar kin2 = 0;
  for (int i = 0; i < d; ++i) {
    const auto& j = jets[static_cast<size_t>(i)];
    kin2 += detail::sq_integral(gr, v_t[i], wa, wh);
    for (const auto& g : j.d1h) kin2 += detail::sq_integral(gr, g, wa, wh);
    kin2 += detail::sq_d2h(gr, j, wa, &wh);
    kin2 += detail::sq_integral(gr, j.d1z, wa, wh);
    for (const auto& g : j.d2hz) kin2 += detail::sq_integral(gr, g, wa, wh);
  }
  acc += kin2 / 2;

  const ArrayX<Scalar> za = state.Z.pow(a);
  Scalar surf = (za * Z_t.square()).sum();
  for (int ax = 0; ax < d; ++ax) {
    const ArrayX<Scalar> g1 = horiz_deriv(gr, state.Z, ax);
    surf += (za * g1.square()).sum();
    for (int b = ax; b < d; ++b) {
      const Scalar mult = (ax == b) ? Scalar(1) : Scalar(2);
      surf += mult * horiz_deriv(gr, g1, b).square().sum();
    }
  }
  acc += pr.g / 2 * surf / Scalar(gr.nh);
  return acc;
}

// Dissipation paired with the relative energy: Z-weighted gradients of v and
// v_t through third order, the weighted v_t mass term, and the surface block.
template <class Scalar>
Scalar relative_dissipation(const State<Scalar>& state, const Velocity<Scalar>& v_t) {
  const Grid<Scalar>& gr = *state.grid;
  const Params<Scalar>& pr = state.params;
  const int d = pr.dim_h;
  const ArrayX<Scalar> wp = detail::level_weights_plain(gr);
  const ArrayX<Scalar> wa = detail::level_weights_alpha(gr);
  const ArrayX<Scalar> za = state.Z.pow(pr.alpha());

  Scalar grads = 0;
  for (int i = 0; i < d; ++i) {
    const auto j = detail::jet2(state, state.v[i]);
    grads += detail::sq_d1(gr, j, wp, &state.Z);
    grads += detail::sq_d2(gr, j, wp, &state.Z);
    for (int c = 0; c < d; ++c) {
      const auto j3 = detail::jet2(state, j.d1h[static_cast<size_t>(c)]);
      grads += detail::sq_d2(gr, j3, wp, &state.Z);
    }
    const auto jt = detail::jet2(state, v_t[i]);
    grads += detail::sq_d1(gr, jt, wp, &state.Z);
  }
  Scalar acc = pr.mu / 2 * grads;

  for (int i = 0; i < d; ++i) acc += detail::sq_integral(gr, v_t[i], wa, za);

  const ArrayX<Scalar> Z_t = surface_tendency(state);
  Scalar surf = Z_t.square().sum();
  for (int ax = 0; ax < d; ++ax) {
    const ArrayX<Scalar> g1 = horiz_deriv(gr, state.Z, ax);
    surf += g1.square().sum();
    for (int b = ax; b < d; ++b) {
      const Scalar mult = (ax == b) ? Scalar(1) : Scalar(2);
      surf += mult * horiz_deriv(gr, g1, b).square().sum();
    }
  }
  return acc + surf / Scalar(gr.nh);
}

template <class Scalar>
DiagRecord<Scalar> collect_diagnostics(const State<Scalar>& state) {
  const ArrayXX<Scalar> W = vertical_velocity(state);
  const ArrayX<Scalar> Z_t = surface_tendency(state);
  const Velocity<Scalar> v_t = velocity_tendency(state, W);
  DiagRecord<Scalar> r;
  r.t = state.t;
  r.mass = mass(state);
  const Vec2<Scalar> mom = momentum(state);
  r.mom_x = mom[0];
  r.mom_y = mom[1];
  r.e_basic = basic_energy(state);
  r.d_basic = basic_dissipation(state);
  r.e_total = total_energy(state, v_t, Z_t);
  r.e_rel = relative_energy(state, v_t, Z_t);
  r.d_rel = relative_dissipation(state, v_t);
  const Vec2<Scalar> del = delta(state);
  r.delta_x = del[0];
  r.delta_y = del[1];
  r.zmin = state.Z.minCoeff();
  r.zmax = state.Z.maxCoeff();
  return r;
}

template <class Scalar>
struct DecayFit {
  Scalar rate = 0;
  Scalar r2 = 0;
};

// Least-squares slope of log(value) against time; samples with nonpositive
// values are excluded, and at least three usable samples are required.
template <class Scalar>
DecayFit<Scalar> fit_decay_rate(const std::vector<Scalar>& times,
                                const std::vector<Scalar>& values) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_decay_rate: length mismatch");
  std::vector<Scalar> t, y;
  for (size_t i = 0; i < times.size(); ++i)
    if (values[i] > Scalar(0) && std::isfinite(values[i])) {
      t.push_back(times[i]);
      y.push_back(std::log(values[i]));
    }
  if (t.size() < 3)
    throw std::invalid_argument("fit_decay_rate: need at least 3 positive samples");
  const Scalar n = Scalar(t.size());
  Scalar tm = 0, ym = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  Scalar stt = 0, sty = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  if (stt == Scalar(0)) throw std::invalid_argument("fit_decay_rate: degenerate times");
  const Scalar slope = sty / stt;
  Scalar ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    const Scalar resid = y[i] - ym - slope * (t[i] - tm);
    ss_res += resid * resid;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  DecayFit<Scalar> fit;
  fit.rate = -slope;
  fit.r2 = ss_tot > Scalar(0) ? 1 - ss_res / ss_tot : Scalar(1);
  return fit;
}

}  // namespace cpe
