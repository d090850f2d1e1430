#include <cmath>

#include "zkb/kernels.hpp"

namespace zkb::kernels {

namespace {

void matmul(const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c, std::size_t ldc,
            std::size_t rows, std::size_t inner, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* crow = c + r * ldc;
    for (std::size_t col = 0; col < cols; ++col) crow[col] = 0.0;
    for (std::size_t p = 0; p < inner; ++p) {
      const double av = a[r * lda + p];
      const double* brow = b + p * ldb;
      for (std::size_t col = 0; col < cols; ++col) crow[col] += av * brow[col];
    }
  }
}

void square(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= x[i];
}

void cmul(const cplx* a, const cplx* x, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i].real() * x[i].real() - a[i].imag() * x[i].imag();
    const double im = a[i].real() * x[i].imag() + a[i].imag() * x[i].real();
    out[i] = {re, im};
  }
}

void cmul_add(const cplx* a, const cplx* x, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a[i].real() * x[i].real() - a[i].imag() * x[i].imag();
    const double im = a[i].real() * x[i].imag() + a[i].imag() * x[i].real();
    out[i] += cplx{re, im};
  }
}

double weighted_dot(const double* w, const double* f, const double* g, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * f[i] * g[i];
  return s;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (std::isnan(v)) return v;
    if (v > m) m = v;
  }
  return m;
}

}  // namespace

const KernelSet& scalar() {
  static const KernelSet set{"scalar", matmul, square, cmul, cmul_add, weighted_dot, max_abs};
  return set;
}

}  // namespace zkb::kernels
