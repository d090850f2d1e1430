#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "zkb/geometry.hpp"

namespace zkb {

using cplx = std::complex<double>;

/// Samples of u on the strip grid, stored y-major: value(ix, iy) = data[iy * Nx + ix].
/// The Dirichlet trace is not stored; it is zero by construction.
class Field {
 public:
  explicit Field(StripGeometry geom);
  Field(StripGeometry geom, std::vector<double> values);

  const StripGeometry& geometry() const { return geom_; }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  double operator()(std::size_t ix, std::size_t iy) const { return data_[iy * geom_.nx() + ix]; }
  double& operator()(std::size_t ix, std::size_t iy) { return data_[iy * geom_.nx() + ix]; }

  bool all_finite() const;

 private:
  StripGeometry geom_;
  std::vector<double> data_;
};

/// Coefficients of u(x,y) = sum_j w_j(y) g_j(x), g_j(x) = sum_n c_jn exp(i k_n (x + Lx)),
/// stored for n = 0..Nx/2 (the negative wavenumbers are conjugates), row j-1 per mode.
class SpectralField {
 public:
  explicit SpectralField(StripGeometry geom);

  const StripGeometry& geometry() const { return geom_; }
  std::size_t modes() const { return geom_.ny(); }
  std::size_t nk() const { return geom_.nk(); }

  std::span<const cplx> coeffs() const { return data_; }
  std::span<cplx> coeffs() { return data_; }
  std::span<const cplx> mode(std::size_t idx) const { return {data_.data() + idx * nk(), nk()}; }
  std::span<cplx> mode(std::size_t idx) { return {data_.data() + idx * nk(), nk()}; }
  cplx operator()(std::size_t idx, std::size_t n) const { return data_[idx * nk() + n]; }
  cplx& operator()(std::size_t idx, std::size_t n) { return data_[idx * nk() + n]; }

  /// ||u||^2 over the truncated strip (Parseval).
  double l2_squared() const;
  /// ||u_x||^2 over the truncated strip (Parseval).
  double dx_l2_squared() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  StripGeometry geom_;
  std::vector<cplx> data_;
};

/// Physical <-> spectral transforms for one grid (Fourier in x, sine in y).
/// Owns FFTW plans and scratch space; not safe for concurrent use, but
/// distinct instances are independent.
class SpectralTransform {
 public:
  explicit SpectralTransform(const StripGeometry& geom);
  ~SpectralTransform();
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;

  const StripGeometry& geometry() const { return geom_; }

  SpectralField forward(const Field& u);
  Field inverse(const SpectralField& s);

  /// Per-mode x profiles d^p g_j / dx^p on the x grid, y-major (Ny rows of Nx).
  std::vector<double> profiles(const SpectralField& s, int derivative = 0);

  /// Physical samples of d^p u / dx^p on the interior grid.
  Field inverse_derivative(const SpectralField& s, int derivative);

 private:
  void profiles_into(const SpectralField& s, int derivative, double* out);

  StripGeometry geom_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// (i k)^p without going through the complex logarithm.
cplx ik_power(double k, int p);

/// In-place x-derivative: multiplies every coefficient by (i k)^p.
/// The Nyquist coefficient is dropped for odd p so that the result stays real.
void differentiate_x(SpectralField& s, int derivative);

}  // namespace zkb
