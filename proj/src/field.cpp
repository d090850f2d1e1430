#include "zkb/field.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "zkb/errors.hpp"

namespace zkb {

Field::Field(StripGeometry geom) : geom_(geom), data_(geom.size(), 0.0) {}

Field::Field(StripGeometry geom, std::vector<double> values) : geom_(geom), data_(std::move(values)) {
  if (data_.size() != geom_.size()) {
    throw ShapeError("field expects " + std::to_string(geom_.size()) + " samples, got " +
                     std::to_string(data_.size()));
  }
}

bool Field::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SpectralField::SpectralField(StripGeometry geom) : geom_(geom), data_(geom.ny() * geom.nk()) {}

namespace {

// Sum over the full spectrum of |c_n|^2 k_n^(2p), folding in the conjugate half.
double parseval_sum(const StripGeometry& g, std::span<const cplx> data, int power) {
  const std::size_t nk = g.nk();
  const std::size_t nyq = g.nx() / 2;
  double total = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const cplx* row = data.data() + j * nk;
    for (std::size_t n = 0; n < nk; ++n) {
      const double mult = (n == 0 || n == nyq) ? 1.0 : 2.0;
      double w = mult * std::norm(row[n]);
      if (power > 0) {
        const double k = g.wavenumber(n);
        w *= std::pow(k * k, power);
      }
      total += w;
    }
  }
  return 2.0 * g.half_length() * total;
}

void check_same(const SpectralField& a, const SpectralField& b) {
  if (!a.geometry().same_grid(b.geometry())) throw ShapeError("spectral fields on different grids");
}

}  // namespace

double SpectralField::l2_squared() const { return parseval_sum(geom_, data_, 0); }
double SpectralField::dx_l2_squared() const { return parseval_sum(geom_, data_, 1); }

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : data_) c *= s;
  return *this;
}

cplx ik_power(double k, int p) {
  const double mag = std::pow(k, p);
  switch (((p % 4) + 4) % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

void differentiate_x(SpectralField& s, int derivative) {
  if (derivative <= 0) return;
  const StripGeometry& g = s.geometry();
  const std::size_t nyq = g.nx() / 2;
  for (std::size_t n = 0; n < g.nk(); ++n) {
    cplx factor = ik_power(g.wavenumber(n), derivative);
    if (n == nyq && derivative % 2 == 1) factor = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j) s(j, n) *= factor;
  }
}

struct SpectralTransform::Impl {
  fft::RealBuffer real;      // Ny x Nx
  fft::ComplexBuffer spec;   // Ny x nk
  fft::Plan r2c;
  fft::Plan c2r;
  fft::Plan dst;
};

SpectralTransform::SpectralTransform(const StripGeometry& geom) : geom_(geom), impl_(std::make_unique<Impl>()) {
  const std::size_t nx = geom.nx(), ny = geom.ny();
  impl_->real = fft::RealBuffer(nx * ny);
  impl_->spec = fft::ComplexBuffer(ny * geom.nk());
  impl_->r2c = fft::make_r2c_rows(nx, ny, impl_->real.data(), impl_->spec.data());
  impl_->c2r = fft::make_c2r_rows(nx, ny, impl_->spec.data(), impl_->real.data());
  impl_->dst = fft::make_dst_columns(ny, nx, impl_->real.data());
}

SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

SpectralField SpectralTransform::forward(const Field& u) {
  if (!u.geometry().same_grid(geom_)) throw ShapeError("field grid does not match transform");
  auto vals = u.values();
  std::copy(vals.begin(), vals.end(), impl_->real.data());
  impl_->dst.execute();
  // g_j(x_i) = dy sum_m u_m w_j(y_m); the DST carries a factor 2.
  const double y_scale = 0.5 * geom_.dy() * std::sqrt(2.0 / geom_.width());
  impl_->r2c.execute();
  const double scale = y_scale / static_cast<double>(geom_.nx());
  SpectralField out(u.geometry());
  auto dst = out.coeffs();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = impl_->spec[i] * scale;
  return out;
}

void SpectralTransform::profiles_into(const SpectralField& s, int derivative, double* out) {
  if (!s.geometry().same_grid(geom_)) throw ShapeError("spectral field grid does not match transform");
  auto src = s.coeffs();
  std::copy(src.begin(), src.end(), impl_->spec.data());
  if (derivative > 0) {
    const std::size_t nk = geom_.nk(), nyq = geom_.nx() / 2;
    for (std::size_t n = 0; n < nk; ++n) {
      cplx factor = ik_power(geom_.wavenumber(n), derivative);
      if (n == nyq && derivative % 2 == 1) factor = 0.0;
      for (std::size_t j = 0; j < geom_.ny(); ++j) impl_->spec[j * nk + n] *= factor;
    }
  }
  impl_->c2r.execute();
  if (out != impl_->real.data()) std::copy(impl_->real.data(), impl_->real.data() + geom_.size(), out);
}

std::vector<double> SpectralTransform::profiles(const SpectralField& s, int derivative) {
  std::vector<double> out(geom_.size());
  profiles_into(s, derivative, out.data());
  return out;
}

Field SpectralTransform::inverse_derivative(const SpectralField& s, int derivative) {
  profiles_into(s, derivative, impl_->real.data());
  impl_->dst.execute();
  const double scale = 0.5 * std::sqrt(2.0 / geom_.width());
  std::vector<double> vals(geom_.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = impl_->real[i] * scale;
  return Field(s.geometry(), std::move(vals));
}

Field SpectralTransform::inverse(const SpectralField& s) { return inverse_derivative(s, 0); }

}  // namespace zkb
