#pragma once

#include <stdexcept>

namespace cpe {

enum class Variant { conservative, nonconservative };

// Physical and model parameters. alpha = 1/(gamma-1) is the degeneracy
// exponent of the density weight z^alpha at the vacuum face.
template <class Scalar>
struct Params {
  int dim_h = 1;
  Scalar gamma = Scalar(2);
  Scalar g = Scalar(1);
  Scalar mu = Scalar(1);
  Scalar lambda = Scalar(1);
  Variant variant = Variant::conservative;

  Scalar alpha() const { return Scalar(1) / (gamma - Scalar(1)); }

  void validate() const {
    if (dim_h != 1 && dim_h != 2) throw std::invalid_argument("params: dim_h must be 1 or 2");
    if (!(gamma > Scalar(1))) throw std::invalid_argument("params: gamma must exceed 1");
    if (!(g > Scalar(0))) throw std::invalid_argument("params: g must be positive");
    if (!(mu > Scalar(0))) throw std::invalid_argument("params: mu must be positive");
    if (!(mu + lambda > Scalar(0))) throw std::invalid_argument("params: mu + lambda must be positive");
  }
};

// Monitored regime for the surface field; solvers stop once Z leaves it.
template <class Scalar>
inline bool within_validity_band(Scalar zmin, Scalar zmax) {
  return zmin > Scalar(0.5) && zmax < Scalar(2);
}

struct ValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cpe
