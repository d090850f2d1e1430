#include <immintrin.h>

#include <cmath>

#include "zkb/kernels.hpp"

namespace zkb::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// One output row, columns [c0, cols).
void matmul_row_tail(const double* a, const double* b, std::size_t ldb, double* crow, std::size_t inner,
                     std::size_t c0, std::size_t cols) {
  std::size_t col = c0;
  for (; col + 4 <= cols; col += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t p = 0; p < inner; ++p) {
      acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + p), _mm256_loadu_pd(b + p * ldb + col), acc);
    }
    _mm256_storeu_pd(crow + col, acc);
  }
  for (; col < cols; ++col) {
    double s = 0.0;
    for (std::size_t p = 0; p < inner; ++p) s = std::fma(a[p], b[p * ldb + col], s);
    crow[col] = s;
  }
}

// Register block: 4 rows x 8 columns, 8 accumulators.
void matmul(const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c, std::size_t ldc,
            std::size_t rows, std::size_t inner, std::size_t cols) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* a0 = a + r * lda;
    const double* a1 = a0 + lda;
    const double* a2 = a1 + lda;
    const double* a3 = a2 + lda;
    std::size_t col = 0;
    for (; col + 8 <= cols; col += 8) {
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
      __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < inner; ++p) {
        const double* bp = b + p * ldb + col;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d av = _mm256_broadcast_sd(a0 + p);
        c00 = _mm256_fmadd_pd(av, b0, c00);
        c01 = _mm256_fmadd_pd(av, b1, c01);
        av = _mm256_broadcast_sd(a1 + p);
        c10 = _mm256_fmadd_pd(av, b0, c10);
        c11 = _mm256_fmadd_pd(av, b1, c11);
        av = _mm256_broadcast_sd(a2 + p);
        c20 = _mm256_fmadd_pd(av, b0, c20);
        c21 = _mm256_fmadd_pd(av, b1, c21);
        av = _mm256_broadcast_sd(a3 + p);
        c30 = _mm256_fmadd_pd(av, b0, c30);
        c31 = _mm256_fmadd_pd(av, b1, c31);
      }
      double* c0 = c + r * ldc + col;
      _mm256_storeu_pd(c0, c00);
      _mm256_storeu_pd(c0 + 4, c01);
      _mm256_storeu_pd(c0 + ldc, c10);
      _mm256_storeu_pd(c0 + ldc + 4, c11);
      _mm256_storeu_pd(c0 + 2 * ldc, c20);
      _mm256_storeu_pd(c0 + 2 * ldc + 4, c21);
      _mm256_storeu_pd(c0 + 3 * ldc, c30);
      _mm256_storeu_pd(c0 + 3 * ldc + 4, c31);
    }
    for (std::size_t rr = 0; rr < 4; ++rr) {
      matmul_row_tail(a + (r + rr) * lda, b, ldb, c + (r + rr) * ldc, inner, col, cols);
    }
  }
  for (; r < rows; ++r) matmul_row_tail(a + r * lda, b, ldb, c + r * ldc, inner, 0, cols);
}

void square(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i, _mm256_mul_pd(v, v));
  }
  for (; i < n; ++i) x[i] *= x[i];
}

// (ar + i ai)(xr + i xi) on two interleaved complex numbers per register.
inline __m256d complex_product(__m256d av, __m256d xv) {
  const __m256d are = _mm256_movedup_pd(av);
  const __m256d aim = _mm256_permute_pd(av, 0xF);
  const __m256d xsw = _mm256_permute_pd(xv, 0x5);
  return _mm256_fmaddsub_pd(are, xv, _mm256_mul_pd(aim, xsw));
}

void cmul(const cplx* a, const cplx* x, cplx* out, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* xd = reinterpret_cast<const double*>(x);
  double* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(od + 2 * i, complex_product(_mm256_loadu_pd(ad + 2 * i), _mm256_loadu_pd(xd + 2 * i)));
  }
  for (; i < n; ++i) {
    out[i] = {std::fma(a[i].real(), x[i].real(), -a[i].imag() * x[i].imag()),
              std::fma(a[i].real(), x[i].imag(), a[i].imag() * x[i].real())};
  }
}

void cmul_add(const cplx* a, const cplx* x, cplx* out, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* xd = reinterpret_cast<const double*>(x);
  double* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d p = complex_product(_mm256_loadu_pd(ad + 2 * i), _mm256_loadu_pd(xd + 2 * i));
    _mm256_storeu_pd(od + 2 * i, _mm256_add_pd(_mm256_loadu_pd(od + 2 * i), p));
  }
  for (; i < n; ++i) {
    out[i] += cplx{std::fma(a[i].real(), x[i].real(), -a[i].imag() * x[i].imag()),
                   std::fma(a[i].real(), x[i].imag(), a[i].imag() * x[i].real())};
  }
}

double weighted_dot(const double* w, const double* f, const double* g, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i)), _mm256_loadu_pd(g + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(f + i + 4)),
                           _mm256_loadu_pd(g + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * f[i] * g[i];
  return s;
}

double max_abs(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  __m256d nan = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i));
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, v);
  }
  if (_mm256_movemask_pd(nan) != 0) return std::nan("");
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double v = std::fabs(x[i]);
    if (std::isnan(v)) return v;
    if (v > r) r = v;
  }
  return r;
}

}  // namespace

const KernelSet& avx2_set() {
  static const KernelSet set{"avx2", matmul, square, cmul, cmul_add, weighted_dot, max_abs};
  return set;
}

}  // namespace zkb::kernels
