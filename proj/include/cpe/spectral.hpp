#pragma once

#include <complex>
#include <unsupported/Eigen/FFT>

#include "cpe/grid.hpp"
#include "cpe/parallel.hpp"

namespace cpe {

template <class Scalar>
using ArrayXc = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

namespace detail {

template <class Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> fft;
  return fft;
}

}  // namespace detail

// Full complex spectrum of a real horizontal field, same ix + nx*iy layout.
template <class Scalar>
ArrayXc<Scalar> to_spectrum(const Grid<Scalar>& gr, const ArrayX<Scalar>& f) {
  auto& fft = detail::fft_engine<Scalar>();
  using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
  using RVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  ArrayXc<Scalar> spec(gr.nh);
  CVec line(gr.nx);
  for (int iy = 0; iy < gr.ny; ++iy) {
    RVec row = f.segment(iy * gr.nx, gr.nx).matrix();
    fft.fwd(line, row);
    spec.segment(iy * gr.nx, gr.nx) = line.array();
  }
  if (gr.dim_h == 2) {
    CVec col(gr.ny), out(gr.ny);
    for (int ix = 0; ix < gr.nx; ++ix) {
      for (int iy = 0; iy < gr.ny; ++iy) col[iy] = spec[ix + gr.nx * iy];
      fft.fwd(out, col);
      for (int iy = 0; iy < gr.ny; ++iy) spec[ix + gr.nx * iy] = out[iy];
    }
  }
  return spec;
}

template <class Scalar>
ArrayX<Scalar> from_spectrum(const Grid<Scalar>& gr, ArrayXc<Scalar> spec) {
  auto& fft = detail::fft_engine<Scalar>();
  using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
  using RVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (gr.dim_h == 2) {
    CVec col(gr.ny), out(gr.ny);
    for (int ix = 0; ix < gr.nx; ++ix) {
      for (int iy = 0; iy < gr.ny; ++iy) col[iy] = spec[ix + gr.nx * iy];
      fft.inv(out, col);
      for (int iy = 0; iy < gr.ny; ++iy) spec[ix + gr.nx * iy] = out[iy];
    }
  }
  ArrayX<Scalar> f(gr.nh);
  CVec line(gr.nx);
  RVec row(gr.nx);
  for (int iy = 0; iy < gr.ny; ++iy) {
    line = spec.segment(iy * gr.nx, gr.nx).matrix();
    fft.inv(row, line);
    f.segment(iy * gr.nx, gr.nx) = row.array();
  }
  return f;
}

// In-place spectral d/dx (axis 0) or d/dy (axis 1); the Nyquist plane of the
// differentiated axis is zeroed so the result maps back to a real field.
template <class Scalar>
void apply_deriv(const Grid<Scalar>& gr, ArrayXc<Scalar>& spec, int axis) {
  const std::complex<Scalar> iunit(0, 1);
  if (axis == 0) {
    for (int iy = 0; iy < gr.ny; ++iy)
      for (int ix = 0; ix < gr.nx; ++ix) {
        auto& c = spec[ix + gr.nx * iy];
        c = (2 * ix == gr.nx) ? std::complex<Scalar>(0) : c * (iunit * gr.kx[ix]);
      }
  } else {
    for (int iy = 0; iy < gr.ny; ++iy) {
      const std::complex<Scalar> fac =
          (2 * iy == gr.ny) ? std::complex<Scalar>(0) : iunit * gr.ky[iy];
      for (int ix = 0; ix < gr.nx; ++ix) spec[ix + gr.nx * iy] *= fac;
    }
  }
}

template <class Scalar>
ArrayX<Scalar> horiz_deriv(const Grid<Scalar>& gr, const ArrayX<Scalar>& f, int axis) {
  ArrayXc<Scalar> spec = to_spectrum(gr, f);
  apply_deriv(gr, spec, axis);
  return from_spectrum(gr, std::move(spec));
}

// Per-level derivative of a volume field (nh x nz).
template <class Scalar>
ArrayXX<Scalar> horiz_deriv(const Grid<Scalar>& gr, const ArrayXX<Scalar>& f, int axis) {
  ArrayXX<Scalar> out(gr.nh, gr.nz);
  parallel_for(gr.nz, [&](int k) {
    ArrayX<Scalar> col = f.col(k);
    out.col(k) = horiz_deriv(gr, col, axis);
  });
  return out;
}

namespace detail {

inline bool keep_mode(int idx, int n) {
  const int m = (idx <= n / 2) ? idx : idx - n;
  return 3 * std::abs(m) <= n;
}

}  // namespace detail

// Two-thirds rule: modes with 3|m| > n on either axis are zeroed.
template <class Scalar>
void dealias_spectrum(const Grid<Scalar>& gr, ArrayXc<Scalar>& spec) {
  for (int iy = 0; iy < gr.ny; ++iy) {
    const bool ky_ok = gr.dim_h == 1 || detail::keep_mode(iy, gr.ny);
    for (int ix = 0; ix < gr.nx; ++ix)
      if (!ky_ok || !detail::keep_mode(ix, gr.nx))
        spec[ix + gr.nx * iy] = std::complex<Scalar>(0);
  }
}

// Same rule across every level of a volume spectrum laid out (nh, nz).
template <class Scalar>
void dealias_spectrum(const Grid<Scalar>& gr,
                      ArrayXX<std::complex<Scalar>>& spec) {
  for (int iy = 0; iy < gr.ny; ++iy) {
    const bool ky_ok = gr.dim_h == 1 || detail::keep_mode(iy, gr.ny);
    for (int ix = 0; ix < gr.nx; ++ix)
      if (!ky_ok || !detail::keep_mode(ix, gr.nx))
        spec.row(ix + gr.nx * iy).setZero();
  }
}

template <class Scalar>
void dealias(const Grid<Scalar>& gr, ArrayX<Scalar>& f) {
  ArrayXc<Scalar> spec = to_spectrum(gr, f);
  dealias_spectrum(gr, spec);
  f = from_spectrum(gr, std::move(spec));
}

template <class Scalar>
void dealias(const Grid<Scalar>& gr, ArrayXX<Scalar>& f) {
  parallel_for(gr.nz, [&](int k) {
    ArrayX<Scalar> col = f.col(k);
    dealias(gr, col);
    f.col(k) = col;
  });
}

}  // namespace cpe
