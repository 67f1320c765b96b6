#pragma once

#include <algorithm>

#include "cpe/dynamics.hpp"

namespace cpe {

enum class Scheme { imex_euler, imex_midpoint, explicit_rk2 };

template <class Scalar>
struct StepConfig {
  Scalar dt = Scalar(1e-3);
  Scheme scheme = Scheme::imex_midpoint;
  Scalar cfl_safety = Scalar(1);
  Scalar solver_tol = Scalar(1e-13);
  int solver_max_iter = 100;
};

namespace detail {

// Tridiagonal solve with constant off-diagonal entries and complex data.
template <class Scalar>
void thomas(const ArrayX<Scalar>& diag, Scalar off, ArrayXc<Scalar>& x,
            ArrayX<Scalar>& cp) {
  const int n = static_cast<int>(diag.size());
  Scalar denom = diag[0];
  cp[0] = off / denom;
  x[0] /= denom;
  for (int k = 1; k < n; ++k) {
    denom = diag[k] - off * cp[k - 1];
    cp[k] = off / denom;
    x[k] = (x[k] - off * x[k - 1]) / denom;
  }
  for (int k = n - 2; k >= 0; --k) x[k] -= cp[k] * x[k + 1];
}

// Longitudinal viscosity of the implicit operator; the transverse one is mu.
template <class Scalar>
Scalar nu_long(const Params<Scalar>& pr) {
  return pr.variant == Variant::conservative ? 2 * pr.mu + pr.lambda : pr.mu;
}

// Per-mode solve of (c0 z^a + dt (nu k^2 - mu Dzz)) x = rhs for each
// polarization; Dzz carries the mirror ghosts, so the matrix row sums stay
// symmetric positive definite.
template <class Scalar>
void solve_modes(const Grid<Scalar>& gr, const Params<Scalar>& pr, Scalar c0,
                 Scalar dt, std::vector<ArrayXX<std::complex<Scalar>>>& spec) {
  const int d = pr.dim_h;
  const Scalar nuL = nu_long(pr);
  const Scalar nuT = pr.mu;
  const Scalar idz2 = Scalar(1) / (gr.dz * gr.dz);
  const bool split = d == 2 && nuL != nuT;

  parallel_for(gr.nh, [&](int m) {
    const int ix = m % gr.nx;
    const int iy = m / gr.nx;
    const Scalar kxv = gr.kx[ix];
    const Scalar kyv = (d == 2) ? gr.ky[iy] : Scalar(0);
    const Scalar k2 = kxv * kxv + kyv * kyv;

    ArrayX<Scalar> diag(gr.nz), cp(gr.nz);
    ArrayXc<Scalar> line(gr.nz), lt(gr.nz);
    auto build_diag = [&](Scalar sigma) {
      for (int k = 0; k < gr.nz; ++k) {
        const Scalar dzz = (k == 0 || k == gr.nz - 1) ? idz2 : 2 * idz2;
        diag[k] = c0 * gr.zpow_alpha[k] + dt * (sigma + pr.mu * dzz);
      }
    };
    const Scalar off = -dt * pr.mu * idz2;

    if (split && k2 > Scalar(0)) {
      const Scalar kn = std::sqrt(k2);
      for (int k = 0; k < gr.nz; ++k) {
        const auto sx = spec[0](m, k);
        const auto sy = spec[1](m, k);
        line[k] = (kxv * sx + kyv * sy) / kn;
        lt[k] = (kxv * sy - kyv * sx) / kn;
      }
      build_diag(nuL * k2);
      thomas(diag, off, line, cp);
      build_diag(nuT * k2);
      thomas(diag, off, lt, cp);
      for (int k = 0; k < gr.nz; ++k) {
        spec[0](m, k) = (kxv * line[k] - kyv * lt[k]) / kn;
        spec[1](m, k) = (kxv * lt[k] + kyv * line[k]) / kn;
      }
    } else {
      build_diag(nuL * k2);
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < gr.nz; ++k) line[k] = spec[static_cast<size_t>(i)](m, k);
        thomas(diag, off, line, cp);
        for (int k = 0; k < gr.nz; ++k) spec[static_cast<size_t>(i)](m, k) = line[k];
      }
    }
  });
}

template <class Scalar>
std::vector<ArrayXX<std::complex<Scalar>>> to_spectra(const Grid<Scalar>& gr,
                                                      const Velocity<Scalar>& f) {
  std::vector<ArrayXX<std::complex<Scalar>>> spec(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    spec[i].resize(gr.nh, gr.nz);
    parallel_for(gr.nz, [&](int k) {
      ArrayX<Scalar> col = f[i].col(k);
      spec[i].col(k) = to_spectrum(gr, col);
    });
  }
  return spec;
}

template <class Scalar>
Velocity<Scalar> from_spectra(const Grid<Scalar>& gr,
                              std::vector<ArrayXX<std::complex<Scalar>>>& spec) {
  Velocity<Scalar> f(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) {
    f[i].resize(gr.nh, gr.nz);
    parallel_for(gr.nz, [&](int k) {
      ArrayXc<Scalar> col = spec[i].col(k);
      f[i].col(k) = from_spectrum(gr, std::move(col));
    });
  }
  return f;
}

// Solve (z^a Z^a - dt L) v = rhs_w with L the implicit viscous operator.
// The variable density factor is split around its midrange value c0 and
// iterated to fixed point; each pass costs one constant-coefficient solve.
// The residual is truncated to the resolved band before each pass, so the
// fixed point solves the band-projected mass system and no aliased content
// from the physical-space products reaches the updated velocity.
template <class Scalar>
Velocity<Scalar> solve_linear(const Grid<Scalar>& gr, const Params<Scalar>& pr,
                              const ArrayX<Scalar>& Zalpha, Scalar dt,
                              const Velocity<Scalar>& rhs_w, Velocity<Scalar> v,
                              Scalar tol, int max_iter) {
  const int d = pr.dim_h;
  const Scalar c0 = (Zalpha.maxCoeff() + Zalpha.minCoeff()) / 2;
  const ArrayX<Scalar> dev = Zalpha - c0;

  for (int it = 0; it < max_iter; ++it) {
    Velocity<Scalar> resid(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      resid[i].resize(gr.nh, gr.nz);
      for (int k = 0; k < gr.nz; ++k)
        resid[i].col(k) = rhs_w[i].col(k) - gr.zpow_alpha[k] * (dev * v[i].col(k));
    }
    auto spec = to_spectra(gr, resid);
    for (auto& comp : spec) dealias_spectrum(gr, comp);
    solve_modes(gr, pr, c0, dt, spec);
    Velocity<Scalar> next = from_spectra(gr, spec);

    Scalar err = 0, scale = 0;
    for (int i = 0; i < d; ++i) {
      err = std::max(err, (next[i] - v[i]).abs().maxCoeff());
      scale = std::max(scale, next[i].abs().maxCoeff());
    }
    v = std::move(next);
    if (err <= tol * scale || err == Scalar(0)) return v;
  }
  throw SolveError("implicit viscous solve did not converge");
}

// L v with exactly the spectral symbol used inside solve_modes, needed for
// the trapezoidal stage of the midpoint scheme.
template <class Scalar>
Velocity<Scalar> apply_linear(const Grid<Scalar>& gr, const Params<Scalar>& pr,
                              const Velocity<Scalar>& v) {
  const int d = pr.dim_h;
  const Scalar nuL = nu_long(pr);
  const Scalar nuT = pr.mu;
  auto spec = to_spectra(gr, v);

  parallel_for(gr.nh, [&](int m) {
    const int ix = m % gr.nx;
    const int iy = m / gr.nx;
    const Scalar kxv = gr.kx[ix];
    const Scalar kyv = (d == 2) ? gr.ky[iy] : Scalar(0);
    const Scalar k2 = kxv * kxv + kyv * kyv;
    if (d == 1) {
      for (int k = 0; k < gr.nz; ++k) spec[0](m, k) *= -nuL * k2;
    } else if (nuL == nuT || k2 == Scalar(0)) {
      for (int k = 0; k < gr.nz; ++k) {
        spec[0](m, k) *= -nuL * k2;
        spec[1](m, k) *= -nuL * k2;
      }
    } else {
      const Scalar kn = std::sqrt(k2);
      for (int k = 0; k < gr.nz; ++k) {
        const auto sx = spec[0](m, k);
        const auto sy = spec[1](m, k);
        const auto vl = (kxv * sx + kyv * sy) / kn * (-nuL * k2);
        const auto vt = (kxv * sy - kyv * sx) / kn * (-nuT * k2);
        spec[0](m, k) = (kxv * vl - kyv * vt) / kn;
        spec[1](m, k) = (kxv * vt + kyv * vl) / kn;
      }
    }
  });

  Velocity<Scalar> out = from_spectra(gr, spec);
  for (int i = 0; i < d; ++i) out[i] += pr.mu * dzz_mirror(gr, v[i]);
  return out;
}

template <class Scalar>
void dealias_state(State<Scalar>& s) {
  dealias(*s.grid, s.Z);
  for (auto& comp : s.v) dealias(*s.grid, comp);
}

template <class Scalar>
State<Scalar> step_imex_euler(const State<Scalar>& s, Scalar dt, Scalar tol,
                              int max_iter) {
  const Grid<Scalar>& gr = *s.grid;
  const ArrayXX<Scalar> W = vertical_velocity(s);
  const ArrayX<Scalar> Zt = surface_tendency(s);
  const Velocity<Scalar> N = explicit_weighted(s, W);
  const ArrayX<Scalar> Za = s.Z.pow(s.params.alpha());

  Velocity<Scalar> rhs(static_cast<size_t>(s.params.dim_h));
  for (int i = 0; i < s.params.dim_h; ++i) {
    rhs[i].resize(gr.nh, gr.nz);
    for (int k = 0; k < gr.nz; ++k)
      rhs[i].col(k) = gr.zpow_alpha[k] * (Za * s.v[i].col(k)) + dt * N[i].col(k);
  }

  State<Scalar> out = s;
  out.v = detail::solve_linear(gr, s.params, Za, dt, rhs, s.v, tol, max_iter);
  out.Z = s.Z + dt * Zt;
  out.t = s.t + dt;
  dealias_state(out);
  return out;
}

template <class Scalar>
State<Scalar> step_imex_midpoint(const State<Scalar>& s, Scalar dt, Scalar tol,
                                 int max_iter) {
  const Grid<Scalar>& gr = *s.grid;
  const Scalar half = dt / 2;
  const State<Scalar> mid = step_imex_euler(s, half, tol, max_iter);

  const ArrayXX<Scalar> Wm = vertical_velocity(mid);
  const ArrayX<Scalar> Ztm = surface_tendency(mid);
  const Velocity<Scalar> Nm = explicit_weighted(mid, Wm);
  const ArrayX<Scalar> Zam = mid.Z.pow(s.params.alpha());
  const Velocity<Scalar> Lv = apply_linear(gr, s.params, s.v);

  Velocity<Scalar> rhs(static_cast<size_t>(s.params.dim_h));
  for (int i = 0; i < s.params.dim_h; ++i) {
    rhs[i].resize(gr.nh, gr.nz);
    for (int k = 0; k < gr.nz; ++k)
      rhs[i].col(k) = gr.zpow_alpha[k] * (Zam * s.v[i].col(k)) +
                      half * Lv[i].col(k) + dt * Nm[i].col(k);
  }

  State<Scalar> out = s;
  out.v = detail::solve_linear(gr, s.params, Zam, half, rhs, mid.v, tol, max_iter);
  out.Z = s.Z + dt * Ztm;
  out.t = s.t + dt;
  dealias_state(out);
  return out;
}

template <class Scalar>
State<Scalar> step_explicit_rk2(const State<Scalar>& s, Scalar dt) {
  const int d = s.params.dim_h;
  State<Scalar> mid = s;
  {
    const Velocity<Scalar> k1 = velocity_tendency(s, vertical_velocity(s));
    const ArrayX<Scalar> k1z = surface_tendency(s);
    mid.Z = s.Z + (dt / 2) * k1z;
    for (int i = 0; i < d; ++i) mid.v[i] = s.v[i] + (dt / 2) * k1[i];
    mid.t = s.t + dt / 2;
    dealias_state(mid);
  }
  State<Scalar> out = s;
  const Velocity<Scalar> k2 = velocity_tendency(mid, vertical_velocity(mid));
  const ArrayX<Scalar> k2z = surface_tendency(mid);
  out.Z = s.Z + dt * k2z;
  for (int i = 0; i < d; ++i) out.v[i] = s.v[i] + dt * k2[i];
  out.t = s.t + dt;
  dealias_state(out);
  return out;
}

}  // namespace detail

template <class Scalar>
State<Scalar> step(const State<Scalar>& s, const StepConfig<Scalar>& cfg) {
  if (!(cfg.dt > Scalar(0))) throw std::invalid_argument("step: dt must be positive");
  State<Scalar> out = [&] {
    switch (cfg.scheme) {
      case Scheme::imex_euler:
        return detail::step_imex_euler(s, cfg.dt, cfg.solver_tol, cfg.solver_max_iter);
      case Scheme::imex_midpoint:
        return detail::step_imex_midpoint(s, cfg.dt, cfg.solver_tol, cfg.solver_max_iter);
      default:
        return detail::step_explicit_rk2(s, cfg.dt);
    }
  }();
  const Scalar zmin = out.Z.minCoeff();
  const Scalar zmax = out.Z.maxCoeff();
  if (!within_validity_band(zmin, zmax))
    throw ValidityError("surface height left the validity band (1/2, 2)");
  return out;
}

// Largest stable/accurate dt at the current state, capped by cfg.dt.  The
// implicit schemes only face the advective and vertical transport limits;
// the explicit scheme adds the viscous one, which carries the full weight
// degeneracy of the bottom cell.
template <class Scalar>
Scalar suggest_dt(const State<Scalar>& state, const StepConfig<Scalar>& cfg) {
  const Grid<Scalar>& gr = *state.grid;
  Scalar dt = cfg.dt;
  const Scalar vx = state.v[0].abs().maxCoeff();
  if (vx > Scalar(0)) dt = std::min(dt, cfg.cfl_safety * gr.dx / vx);
  if (state.params.dim_h == 2) {
    const Scalar vy = state.v[1].abs().maxCoeff();
    if (vy > Scalar(0)) dt = std::min(dt, cfg.cfl_safety * gr.dy / vy);
  }
  const Scalar wmax = vertical_velocity(state).abs().maxCoeff();
  if (wmax > Scalar(0)) dt = std::min(dt, cfg.cfl_safety * gr.dz / wmax);
  if (cfg.scheme == Scheme::explicit_rk2) {
    using std::pow;
    Scalar k2max = pow(Scalar(EIGEN_PI) * gr.nx, 2);
    if (state.params.dim_h == 2) k2max += pow(Scalar(EIGEN_PI) * gr.ny, 2);
    const Scalar mass_min =
        gr.zpow_alpha.minCoeff() * pow(state.Z.minCoeff(), state.params.alpha());
    const Scalar lam = (detail::nu_long(state.params) * k2max +
                        4 * state.params.mu / (gr.dz * gr.dz)) /
                       mass_min;
    dt = std::min(dt, cfg.cfl_safety * 2 / lam);
  }
  return dt;
}

}  // namespace cpe
