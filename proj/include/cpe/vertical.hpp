#pragma once

#include "cpe/grid.hpp"

namespace cpe {

// Vertical operators on cell-centered volume fields (nh x nz).  Ghost cells
// mirror the interior (even reflection), encoding d/dz = 0 at both faces.

template <class Scalar>
ArrayXX<Scalar> dz_centered(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  const int nz = gr.nz;
  ArrayXX<Scalar> out(gr.nh, nz);
  const Scalar inv2dz = Scalar(1) / (2 * gr.dz);
  out.col(0) = (f.col(1) - f.col(0)) * inv2dz;
  for (int k = 1; k + 1 < nz; ++k) out.col(k) = (f.col(k + 1) - f.col(k - 1)) * inv2dz;
  out.col(nz - 1) = (f.col(nz - 1) - f.col(nz - 2)) * inv2dz;
  return out;
}

// Centered first derivative of a field odd across the faces (ghost = -first
// interior value), e.g. of something that is itself a z-derivative.
template <class Scalar>
ArrayXX<Scalar> dz_centered_odd(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  const int nz = gr.nz;
  ArrayXX<Scalar> out(gr.nh, nz);
  const Scalar inv2dz = Scalar(1) / (2 * gr.dz);
  out.col(0) = (f.col(1) + f.col(0)) * inv2dz;
  for (int k = 1; k + 1 < nz; ++k) out.col(k) = (f.col(k + 1) - f.col(k - 1)) * inv2dz;
  out.col(nz - 1) = (-f.col(nz - 1) - f.col(nz - 2)) * inv2dz;
  return out;
}

template <class Scalar>
ArrayXX<Scalar> dzz_mirror(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  const int nz = gr.nz;
  ArrayXX<Scalar> out(gr.nh, nz);
  const Scalar invdz2 = Scalar(1) / (gr.dz * gr.dz);
  out.col(0) = (f.col(1) - f.col(0)) * invdz2;
  for (int k = 1; k + 1 < nz; ++k)
    out.col(k) = (f.col(k + 1) - 2 * f.col(k) + f.col(k - 1)) * invdz2;
  out.col(nz - 1) = (f.col(nz - 2) - f.col(nz - 1)) * invdz2;
  return out;
}

}  // namespace cpe
