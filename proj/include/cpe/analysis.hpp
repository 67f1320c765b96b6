#pragma once

#include <cmath>
#include <functional>

#include "cpe/diagnostics.hpp"

namespace cpe {

// Variants of the weighted one-dimensional inequality battery.
//   whole_interval: k > 1, |g| controlled on (0, L) by the shifted weight.
//   zero_trace:     k < 1, |g - g(0)| controlled by the derivative alone.
//   truncated:      k > 1, control on (0, omega) with omega-scaled penalties.
enum class HardyCase { whole_interval, zero_trace, truncated };

template <class Scalar>
struct HardyReport {
  Scalar lhs = 0;
  Scalar rhs = 0;
  Scalar ratio = 0;
  bool lhs_divergent = false;
  bool rhs_divergent = false;
};

namespace detail {

// int_a^b s^q ds, with the logarithmic case and endpoint blowup handled.
template <class Scalar>
Scalar power_integral(Scalar q, Scalar a, Scalar b) {
  using std::log;
  using std::pow;
  if (q == Scalar(-1)) return log(b / a);
  const Scalar pa = (a == Scalar(0) && q + 1 > Scalar(0)) ? Scalar(0) : pow(a, q + 1);
  return (pow(b, q + 1) - pa) / (q + 1);
}

// int_a^b s^p (A + B s)^2 ds for the linear interpolant through
// (a, fa), (b, fb).  Vanishing coefficients skip their moments, so a zero
// trace at the origin never multiplies an endpoint-divergent integral.
template <class Scalar>
Scalar weighted_sq_segment(Scalar p, Scalar a, Scalar b, Scalar fa, Scalar fb) {
  const Scalar B = (fb - fa) / (b - a);
  const Scalar A = fa - B * a;
  Scalar out = 0;
  if (A != Scalar(0)) out += A * A * power_integral(p, a, b);
  if (A != Scalar(0) && B != Scalar(0))
    out += 2 * A * B * power_integral(p + 1, a, b);
  if (B != Scalar(0)) out += B * B * power_integral(p + 2, a, b);
  return out;
}

template <class Scalar>
Scalar weighted_deriv_segment(Scalar p, Scalar a, Scalar b, Scalar fa, Scalar fb) {
  const Scalar B = (fb - fa) / (b - a);
  return B * B * power_integral(p, a, b);
}

// Both sides of the inequality from samples on (0, upper]: s_i = i*upper/n,
// i = 1..n.  The segment (0, s_1) uses the line extrapolated through the two
// innermost samples, so the trace value is g(0) = 2 g(s_1) - g(s_2) and the
// zero_trace case has an exactly vanishing constant term at the origin.
template <class Scalar>
void hardy_sides(const std::function<Scalar(Scalar)>& g, Scalar k, Scalar len,
                 HardyCase variant, Scalar omega, int n, Scalar& lhs, Scalar& rhs) {
  const Scalar upper = variant == HardyCase::truncated ? omega : len;
  std::vector<Scalar> s(static_cast<size_t>(n) + 1), f(static_cast<size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    s[static_cast<size_t>(i)] = upper * Scalar(i) / Scalar(n);
    f[static_cast<size_t>(i)] = g(s[static_cast<size_t>(i)]);
  }
  s[0] = 0;
  f[0] = 2 * f[1] - f[2];
  if (variant == HardyCase::zero_trace) {
    const Scalar f0 = f[0];
    for (auto& val : f) val -= f0;
  }
  lhs = 0;
  rhs = 0;
  for (int i = 0; i < n; ++i) {
    const Scalar a = s[static_cast<size_t>(i)], b = s[static_cast<size_t>(i) + 1];
    const Scalar fa = f[static_cast<size_t>(i)], fb = f[static_cast<size_t>(i) + 1];
    lhs += weighted_sq_segment(k - 2, a, b, fa, fb);
    switch (variant) {
      case HardyCase::whole_interval:
        rhs += weighted_sq_segment(k, a, b, fa, fb) / (len * len) +
               weighted_deriv_segment(k, a, b, fa, fb);
        break;
      case HardyCase::zero_trace:
        rhs += weighted_deriv_segment(k, a, b, fa, fb);
        break;
      case HardyCase::truncated:
        rhs += weighted_sq_segment(k, a, b, fa, fb) / (omega * omega) +
               omega * omega * weighted_deriv_segment(k - 2, a, b, fa, fb);
        break;
    }
  }
}

// A side is flagged divergent when it is non-finite or keeps near-doubling
// under two successive 4x sample refinements.
template <class Scalar>
bool divergent_trend(Scalar v0, Scalar v1, Scalar v2) {
  if (!std::isfinite(v0) || !std::isfinite(v1) || !std::isfinite(v2)) return true;
  return v0 > Scalar(0) && v1 / v0 >= Scalar(1.9) && v2 / v1 >= Scalar(1.9);
}

}  // namespace detail

template <class Scalar>
HardyReport<Scalar> check_hardy(const std::function<Scalar(Scalar)>& g, Scalar k,
                                Scalar len, HardyCase variant,
                                Scalar omega = Scalar(0.5), int n = 256) {
  if (!(len > Scalar(0))) throw std::invalid_argument("check_hardy: length must be positive");
  if (n < 4) throw std::invalid_argument("check_hardy: need at least 4 segments");
  if (variant == HardyCase::zero_trace) {
    if (!(k < Scalar(1)))
      throw std::invalid_argument("check_hardy: zero_trace case requires k < 1");
  } else {
    if (!(k > Scalar(1)))
      throw std::invalid_argument("check_hardy: this case requires k > 1");
  }
  if (variant == HardyCase::truncated && !(omega > Scalar(0) && omega < Scalar(1)))
    throw std::invalid_argument("check_hardy: omega must lie in (0, 1)");

  Scalar l0, r0, l1, r1, l2, r2;
  detail::hardy_sides(g, k, len, variant, omega, n, l0, r0);
  detail::hardy_sides(g, k, len, variant, omega, 4 * n, l1, r1);
  detail::hardy_sides(g, k, len, variant, omega, 16 * n, l2, r2);

  HardyReport<Scalar> rep;
  rep.lhs = l2;
  rep.rhs = r2;
  rep.lhs_divergent = detail::divergent_trend(l0, l1, l2);
  rep.rhs_divergent = detail::divergent_trend(r0, r1, r2);
  rep.ratio = (rep.rhs != Scalar(0)) ? rep.lhs / rep.rhs : Scalar(0);
  return rep;
}

template <class Scalar>
struct PoincareReport {
  Scalar lhs = 0;
  Scalar rhs = 0;
  Scalar ratio = 0;
};

namespace detail {

// Cubic interpolation of level data onto a refine-fold finer set of cell
// centers, with even reflection past both walls.
template <class Scalar>
ArrayXX<Scalar> refine_levels(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f,
                              int refine) {
  const int m = gr.nz * refine;
  ArrayXX<Scalar> out(gr.nh, m);
  auto reflect = [&](int k) {
    if (k < 0) return -k - 1;
    if (k >= gr.nz) return 2 * gr.nz - 1 - k;
    return k;
  };
  for (int j = 0; j < m; ++j) {
    const Scalar zq = (Scalar(j) + Scalar(0.5)) / Scalar(m);
    const Scalar u = zq / gr.dz - Scalar(0.5);
    const int k0 = static_cast<int>(std::floor(u));
    const Scalar t = u - Scalar(k0);
    const Scalar w0 = -t * (t - 1) * (t - 2) / 6;
    const Scalar w1 = (t + 1) * (t - 1) * (t - 2) / 2;
    const Scalar w2 = -(t + 1) * t * (t - 2) / 2;
    const Scalar w3 = (t + 1) * t * (t - 1) / 6;
    out.col(j) = w0 * f.col(reflect(k0 - 1)) + w1 * f.col(reflect(k0)) +
                 w2 * f.col(reflect(k0 + 1)) + w3 * f.col(reflect(k0 + 2));
  }
  return out;
}

template <class Scalar>
ArrayXX<Scalar> diff_levels(const ArrayXX<Scalar>& f, Scalar h, bool even) {
  const auto m = f.cols();
  const Scalar sgn = even ? Scalar(1) : Scalar(-1);
  ArrayXX<Scalar> out(f.rows(), m);
  out.col(0) = (f.col(1) - sgn * f.col(0)) / (2 * h);
  for (Eigen::Index j = 1; j + 1 < m; ++j)
    out.col(j) = (f.col(j + 1) - f.col(j - 1)) / (2 * h);
  out.col(m - 1) = (sgn * f.col(m - 1) - f.col(m - 2)) / (2 * h);
  return out;
}

}  // namespace detail

// Weighted L^2 of v against vertical derivatives up to third order with a
// lighter weight, the weighted horizontal gradient, and a surface-deviation
// coupling.  Requires 0 < alpha < 3 and 0 <= beta < 4 - alpha.  Vertical
// derivatives are taken by repeated centered differencing on a 4x refined
// vertical grid after cubic interpolation, alternating the wall parity.
template <class Scalar>
PoincareReport<Scalar> check_poincare(const State<Scalar>& state,
                                      const ArrayXX<Scalar>& W, Scalar beta) {
  (void)W;
  const Grid<Scalar>& gr = *state.grid;
  const Scalar a = state.params.alpha();
  if (!(a > Scalar(0) && a < Scalar(3)))
    throw std::invalid_argument("check_poincare: requires 0 < alpha < 3");
  if (!(beta >= Scalar(0) && beta < Scalar(4) - a))
    throw std::invalid_argument("check_poincare: requires 0 <= beta < 4 - alpha");

  const ArrayX<Scalar> wa = detail::level_weights_alpha(gr);
  const int d = state.params.dim_h;
  const int refine = 4;
  const int m = gr.nz * refine;
  const Scalar h = Scalar(1) / Scalar(m);
  ArrayX<Scalar> wb(m);
  for (int j = 0; j < m; ++j)
    wb[j] = std::pow((Scalar(j) + Scalar(0.5)) * h, beta) * h;

  Scalar lhs = 0, vert = 0, horiz = 0;
  for (int i = 0; i < d; ++i) {
    lhs += detail::sq_integral(gr, state.v[i], wa);
    const ArrayXX<Scalar> fine = detail::refine_levels(gr, state.v[i], refine);
    const ArrayXX<Scalar> d1 = detail::diff_levels(fine, h, true);
    const ArrayXX<Scalar> d2 = detail::diff_levels(d1, h, false);
    const ArrayXX<Scalar> d3 = detail::diff_levels(d2, h, true);
    for (int j = 0; j < m; ++j)
      vert += wb[j] * (d1.col(j).square().sum() + d2.col(j).square().sum() +
                       d3.col(j).square().sum()) /
              Scalar(gr.nh);
    for (int j = 0; j < d; ++j)
      horiz += detail::sq_integral(gr, horiz_deriv(gr, state.v[i], j), wa);
  }

  const ArrayX<Scalar> dev = state.Z.pow(a + 1) - 1;
  Scalar h2 = dev.square().sum() / Scalar(gr.nh);
  for (int ax = 0; ax < d; ++ax) {
    const ArrayX<Scalar> g1 = horiz_deriv(gr, dev, ax);
    h2 += g1.square().sum() / Scalar(gr.nh);
    for (int b = ax; b < d; ++b) {
      const Scalar mult = (ax == b) ? Scalar(1) : Scalar(2);
      h2 += mult * horiz_deriv(gr, g1, b).square().sum() / Scalar(gr.nh);
    }
  }

  PoincareReport<Scalar> rep;
  rep.lhs = lhs;
  rep.rhs = vert + horiz + lhs * h2;
  rep.ratio = rep.rhs > Scalar(0) ? rep.lhs / rep.rhs : Scalar(0);
  return rep;
}

template <class Scalar>
struct EquivalenceReport {
  Scalar C = 0;
  bool violation = false;
};

// Two-sided comparability of the corrected relative energy with the full
// squared-norm bundle over a family of states.  A nonpositive relative
// energy on any member is a definiteness violation.
template <class Scalar>
EquivalenceReport<Scalar> check_energy_equivalence(const std::vector<State<Scalar>>& family) {
  EquivalenceReport<Scalar> rep;
  for (const auto& s : family) {
    const ArrayXX<Scalar> W = vertical_velocity(s);
    const ArrayX<Scalar> Z_t = surface_tendency(s);
    const Velocity<Scalar> v_t = velocity_tendency(s, W);
    const Scalar e_rel = relative_energy(s, v_t, Z_t);
    const Scalar e_tot = total_energy(s, v_t, Z_t);
    if (!(e_rel > Scalar(0)) || !std::isfinite(e_rel) || !std::isfinite(e_tot)) {
      rep.violation = true;
      continue;
    }
    if (e_tot > Scalar(0))
      rep.C = std::max({rep.C, e_tot / e_rel, e_rel / e_tot});
  }
  return rep;
}

}  // namespace cpe
