#pragma once

#include <memory>
#include <vector>

#include "cpe/grid.hpp"
#include "cpe/params.hpp"

namespace cpe {

template <class Scalar>
using GridPtr = std::shared_ptr<const Grid<Scalar>>;

template <class Scalar>
GridPtr<Scalar> make_grid(int dim_h, int nx, int ny, int nz, Scalar alpha) {
  return std::make_shared<const Grid<Scalar>>(build_grid<Scalar>(dim_h, nx, ny, nz, alpha));
}

// Prognostic snapshot on the fixed slab: free surface Z(x) and horizontal
// velocity components v[i](x, z).  The vertical velocity is diagnostic and
// recomputed from these, never stored.  Treat snapshots as immutable;
// steppers return new ones, so sharing across workers is safe.
template <class Scalar>
struct State {
  GridPtr<Scalar> grid;
  Params<Scalar> params;
  Scalar t = 0;
  ArrayX<Scalar> Z;
  std::vector<ArrayXX<Scalar>> v;
};

}  // namespace cpe
