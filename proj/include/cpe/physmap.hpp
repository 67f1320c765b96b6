#pragma once

#include "cpe/kinematics.hpp"

namespace cpe {

// Physical-space reconstruction at the images of the fixed-grid nodes.  The
// vertical levels are non-uniform in physical space; rho_uniform is a
// per-column linear resampling onto nz_phys equispaced levels, for plotting.
template <class Scalar>
struct PhysSnapshot {
  ArrayX<Scalar> Z;
  ArrayXX<Scalar> z_phys;
  ArrayXX<Scalar> rho;
  std::vector<ArrayXX<Scalar>> v;
  ArrayXX<Scalar> w;
  ArrayXX<Scalar> z_uniform;
  ArrayXX<Scalar> rho_uniform;
  long clamp_warnings = 0;
};

template <class Scalar>
Scalar equilibrium_density_profile(Scalar z_phys, const Params<Scalar>& params,
                                   bool* out_of_range = nullptr) {
  if (out_of_range) *out_of_range = false;
  if (z_phys > Scalar(1)) {
    if (out_of_range) *out_of_range = true;
    return Scalar(0);
  }
  using std::pow;
  const Scalar base =
      (params.gamma - 1) / params.gamma * params.g * (Scalar(1) - z_phys);
  return pow(base, Scalar(1) / (params.gamma - 1));
}

template <class Scalar>
PhysSnapshot<Scalar> to_physical(const State<Scalar>& state, const ArrayXX<Scalar>& W,
                                 const ArrayX<Scalar>& Z_t, int nz_phys = 0) {
  const Grid<Scalar>& gr = *state.grid;
  const Params<Scalar>& pr = state.params;
  if (!within_validity_band(state.Z.minCoeff(), state.Z.maxCoeff()))
    throw ValidityError("to_physical: surface height outside the validity band");

  PhysSnapshot<Scalar> out;
  out.Z = state.Z;
  out.v = state.v;
  out.z_phys.resize(gr.nh, gr.nz);
  out.rho.resize(gr.nh, gr.nz);
  out.w.resize(gr.nh, gr.nz);

  std::vector<ArrayX<Scalar>> gradZ(static_cast<size_t>(pr.dim_h));
  for (int j = 0; j < pr.dim_h; ++j) gradZ[j] = horiz_deriv(gr, state.Z, j);

  using std::pow;
  const Scalar pre = (pr.gamma - 1) / pr.gamma * pr.g;
  const Scalar expo = Scalar(1) / (pr.gamma - 1);
  for (int k = 0; k < gr.nz; ++k) {
    out.z_phys.col(k) = state.Z * (1 - gr.z[k]);
    ArrayX<Scalar> depth = state.Z - out.z_phys.col(k);
    for (int x = 0; x < gr.nh; ++x)
      if (depth[x] < Scalar(0)) {
        depth[x] = Scalar(0);
        ++out.clamp_warnings;
      }
    out.rho.col(k) = (pre * depth).pow(expo);
    ArrayX<Scalar> surf_follow = Z_t;
    for (int j = 0; j < pr.dim_h; ++j) surf_follow += state.v[j].col(k) * gradZ[j];
    out.w.col(k) = -(gr.z[k] - 1) * surf_follow - state.Z * W.col(k);
  }

  if (nz_phys > 0) {
    out.z_uniform.resize(gr.nh, nz_phys);
    out.rho_uniform.resize(gr.nh, nz_phys);
    for (int x = 0; x < gr.nh; ++x) {
      // node images run from the surface (k = 0) down to the ground; extend
      // with the exact endpoint values rho(Z) = 0 and the ground density
      const Scalar zx = state.Z[x];
      const Scalar rho_ground = pow(pre * zx, expo);
      auto interp = [&](Scalar zq) {
        if (zq >= out.z_phys(x, 0)) {
          const Scalar z0 = out.z_phys(x, 0);
          const Scalar t = (zx - z0 > Scalar(0)) ? (zq - z0) / (zx - z0) : Scalar(1);
          return (1 - t) * out.rho(x, 0);
        }
        if (zq <= out.z_phys(x, gr.nz - 1)) {
          const Scalar z1 = out.z_phys(x, gr.nz - 1);
          const Scalar t = (z1 > Scalar(0)) ? zq / z1 : Scalar(1);
          return (1 - t) * rho_ground + t * out.rho(x, gr.nz - 1);
        }
        int k = 0;
        while (k + 1 < gr.nz && out.z_phys(x, k + 1) > zq) ++k;
        const Scalar za = out.z_phys(x, k), zb = out.z_phys(x, k + 1);
        const Scalar t = (za - zq) / (za - zb);
        return (1 - t) * out.rho(x, k) + t * out.rho(x, k + 1);
      };
      for (int j = 0; j < nz_phys; ++j) {
        const Scalar zq = zx * (Scalar(j) + Scalar(0.5)) / Scalar(nz_phys);
        out.z_uniform(x, j) = zq;
        out.rho_uniform(x, j) = interp(zq);
      }
    }
  }
  return out;
}

}  // namespace cpe
