#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace cpe {

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Horizontal fields live on the periodic unit torus, flattened ix + nx*iy.
// Volume fields are (nh x nz); column k holds the horizontal field at the
// vertical cell center z_k = (k+1/2)/nz.  There is never a node at z = 0
// (vacuum face) or z = 1 (ground), so the weight z^alpha stays positive.
template <class Scalar>
struct Grid {
  int dim_h = 1;
  int nx = 0, ny = 1, nz = 0;
  int nh = 0;
  Scalar alpha = Scalar(1);
  Scalar dx = 0, dy = 0, dz = 0;

  ArrayX<Scalar> z;           // cell centers, size nz
  ArrayX<Scalar> zpow_alpha;  // z_k^alpha
  ArrayX<Scalar> kx;          // signed wavenumbers 2*pi*m, size nx
  ArrayX<Scalar> ky;          // size ny

  // Weight-exact quadrature against z^alpha: per segment between adjacent
  // cell centers the integrand is linearly interpolated and the weighted
  // integral taken in closed form; the end segments [0,z_0] and [z_{nz-1},1]
  // extrapolate through the two nearest centers, so any global a + b*z is
  // integrated exactly for every alpha.
  ArrayX<Scalar> quad_full;            // weights for int_0^1 xi^alpha f dxi
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> quad_cum;  // row k: int_0^{z_k}
};

namespace detail {

// Weights of f(z_p), f(z_q) for int_a^b xi^alpha * L(xi) dxi where L is the
// line through (z_p, f_p), (z_q, f_q).
template <class Scalar>
void segment_weights(Scalar a, Scalar b, Scalar zp, Scalar zq, Scalar alpha,
                     Scalar& wp, Scalar& wq) {
  using std::pow;
  const Scalar p0 = (pow(b, alpha + 1) - pow(a, alpha + 1)) / (alpha + 1);
  const Scalar p1 = (pow(b, alpha + 2) - pow(a, alpha + 2)) / (alpha + 2);
  wq = (p1 - zp * p0) / (zq - zp);
  wp = p0 - wq;
}

inline bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace detail

template <class Scalar>
Grid<Scalar> build_grid(int dim_h, int nx, int ny, int nz, Scalar alpha) {
  if (dim_h != 1 && dim_h != 2) throw std::invalid_argument("grid: dim_h must be 1 or 2");
  if (dim_h == 1) ny = 1;
  if (nz < 2) throw std::invalid_argument("grid: nz must be at least 2");
  if (!(alpha > Scalar(0))) throw std::invalid_argument("grid: alpha must be positive");
  if (!detail::is_pow2(nx) || nx < 4) throw std::invalid_argument("grid: nx must be a power of two >= 4");
  if (dim_h == 2 && (!detail::is_pow2(ny) || ny < 4))
    throw std::invalid_argument("grid: ny must be a power of two >= 4");

  Grid<Scalar> gr;
  gr.dim_h = dim_h;
  gr.nx = nx;
  gr.ny = ny;
  gr.nz = nz;
  gr.nh = nx * ny;
  gr.alpha = alpha;
  gr.dx = Scalar(1) / Scalar(nx);
  gr.dy = Scalar(1) / Scalar(ny);
  gr.dz = Scalar(1) / Scalar(nz);

  gr.z.resize(nz);
  for (int k = 0; k < nz; ++k) gr.z[k] = (Scalar(k) + Scalar(0.5)) / Scalar(nz);
  gr.zpow_alpha = gr.z.pow(alpha);

  const Scalar two_pi = Scalar(2) * Scalar(EIGEN_PI);
  auto wavenumbers = [two_pi](int n) {
    ArrayX<Scalar> k(n);
    for (int m = 0; m < n; ++m) {
      const int ms = (m <= n / 2) ? m : m - n;
      k[m] = two_pi * Scalar(ms);
    }
    return k;
  };
  gr.kx = wavenumbers(nx);
  gr.ky = wavenumbers(ny);

  gr.quad_cum.setZero(nz, nz);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row(nz);
  row.setZero();
  Scalar wp, wq;
  // bottom segment [0, z_0], extrapolated through centers 0 and 1
  detail::segment_weights(Scalar(0), gr.z[0], gr.z[0], gr.z[1], alpha, wp, wq);
  row[0] += wp;
  row[1] += wq;
  gr.quad_cum.row(0) = row.transpose();
  for (int k = 1; k < nz; ++k) {
    detail::segment_weights(gr.z[k - 1], gr.z[k], gr.z[k - 1], gr.z[k], alpha, wp, wq);
    row[k - 1] += wp;
    row[k] += wq;
    gr.quad_cum.row(k) = row.transpose();
  }
  // top segment [z_{nz-1}, 1]; quad_full is the last cumulative row extended
  // to z = 1 with the same weights, so the two agree bitwise by construction.
  detail::segment_weights(gr.z[nz - 1], Scalar(1), gr.z[nz - 2], gr.z[nz - 1], alpha, wp, wq);
  row[nz - 2] += wp;
  row[nz - 1] += wq;
  gr.quad_full = row.array();
  return gr;
}

// int_0^1 xi^alpha f(.,xi) dxi for a volume field, one value per column.
template <class Scalar>
ArrayX<Scalar> vertical_avg_weighted(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  return (f.matrix() * gr.quad_full.matrix()).array();
}

// int_0^{z_k} xi^alpha f(.,xi) dxi at every level k.
template <class Scalar>
ArrayXX<Scalar> cumulative_weighted(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f) {
  return (f.matrix() * gr.quad_cum.transpose()).array();
}

}  // namespace cpe
