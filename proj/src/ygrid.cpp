#include "ygrid.hpp"

#include <cmath>
#include <numbers>

#include "zkb/kernels.hpp"

namespace zkb::detail {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> sine_synthesis_matrix(double B, std::size_t ny, std::size_t intervals) {
  const std::size_t rows = intervals - 1;
  const double norm = std::sqrt(2.0 / B);
  std::vector<double> e(rows * ny);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t j = 0; j < ny; ++j) {
      e[m * ny + j] = norm * std::sin(static_cast<double>((j + 1) * (m + 1)) * kPi / static_cast<double>(intervals));
    }
  }
  return e;
}

std::vector<double> sine_projection_matrix(double B, std::size_t ny, std::size_t intervals) {
  const std::size_t rows = intervals - 1;
  const double M = static_cast<double>(intervals);
  // f(theta) = sum_p a_p cos(p theta), a_p = alpha_p sum_m f_m cos(p m pi / M) (f_0 = f_M = 0),
  // and int_0^pi cos(p theta) sin(j theta) d theta = 2j / (j^2 - p^2) for j + p odd.
  std::vector<long double> cos_table((intervals + 1) * rows);
  for (std::size_t p = 0; p <= intervals; ++p) {
    for (std::size_t m = 0; m < rows; ++m) {
      const std::size_t arg = (p * (m + 1)) % (2 * intervals);
      cos_table[p * rows + m] = std::cos(static_cast<long double>(arg) * std::numbers::pi_v<long double> / M);
    }
  }
  const long double scale = std::sqrt(2.0L / B) * (static_cast<long double>(B) / std::numbers::pi_v<long double>);
  std::vector<double> proj(ny * rows);
  for (std::size_t jj = 0; jj < ny; ++jj) {
    const long double j = static_cast<long double>(jj + 1);
    for (std::size_t m = 0; m < rows; ++m) {
      long double acc = 0.0L;
      for (std::size_t p = 0; p <= intervals; ++p) {
        if ((jj + 1 + p) % 2 == 0) continue;
        const long double pl = static_cast<long double>(p);
        const long double alpha = (p == 0 || p == intervals) ? 1.0L / M : 2.0L / M;
        acc += alpha * (2.0L * j / (j * j - pl * pl)) * cos_table[p * rows + m];
      }
      proj[jj * rows + m] = static_cast<double>(scale * acc);
    }
  }
  return proj;
}

FineSampler::FineSampler(const StripGeometry& geom)
    : geom_(geom),
      rows_(fine_intervals(geom.ny()) - 1),
      cols_(2 * geom.nx()),
      dx_(geom.dx() / 2.0),
      dy_(geom.width() / static_cast<double>(fine_intervals(geom.ny()))),
      synth_(sine_synthesis_matrix(geom.width(), geom.ny(), fine_intervals(geom.ny()))),
      spec_(geom.ny() * (geom.nx() + 1)),
      prof_(geom.ny() * 2 * geom.nx()) {
  c2r_ = fft::make_c2r_rows(cols_, geom.ny(), spec_.data(), prof_.data());
}

double FineSampler::x(std::size_t i) const { return -geom_.half_length() + static_cast<double>(i) * dx_; }

std::vector<double> FineSampler::sample(const SpectralField& s, int derivative) {
  const std::size_t nk = geom_.nk(), nkf = geom_.nx() + 1, nyq = geom_.nx() / 2;
  for (std::size_t j = 0; j < geom_.ny(); ++j) {
    cplx* row = spec_.data() + j * nkf;
    for (std::size_t n = 0; n < nkf; ++n) row[n] = 0.0;
    for (std::size_t n = 0; n < nk; ++n) {
      cplx c = s(j, n) * ik_power(geom_.wavenumber(n), derivative);
      if (n == nyq) c = (derivative % 2 == 1) ? cplx{} : cplx{0.5 * c.real(), 0.0};
      row[n] = c;
    }
  }
  c2r_.execute();
  std::vector<double> out(rows_ * cols_);
  kernels::active().matmul(synth_.data(), geom_.ny(), prof_.data(), cols_, out.data(), cols_, rows_, geom_.ny(), cols_);
  return out;
}

}  // namespace zkb::detail
