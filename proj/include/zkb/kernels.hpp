#pragma once

// Data-parallel inner loops of the solver and the diagnostics. Every kernel
// has a portable scalar reference and, on x86-64, an AVX2/FMA variant; the
// variant is chosen once per process from CPUID. Setting ZKB_KERNELS=scalar
// in the environment forces the reference path.

#include <complex>
#include <cstddef>
#include <string_view>

namespace zkb::kernels {

using cplx = std::complex<double>;

struct KernelSet {
  std::string_view name;

  /// C[r][c] = sum_p A[r][p] B[p][c] for r < rows, c < cols (row-major, leading dimensions given).
  void (*matmul)(const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c, std::size_t ldc,
                 std::size_t rows, std::size_t inner, std::size_t cols);
  /// x[i] = x[i]^2
  void (*square)(double* x, std::size_t n);
  /// out[i] = a[i] * x[i]
  void (*cmul)(const cplx* a, const cplx* x, cplx* out, std::size_t n);
  /// out[i] += a[i] * x[i]
  void (*cmul_add)(const cplx* a, const cplx* x, cplx* out, std::size_t n);
  /// sum_i w[i] f[i] g[i]
  double (*weighted_dot)(const double* w, const double* f, const double* g, std::size_t n);
  /// max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelSet& scalar();
/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelSet* avx2();
/// The set used by the library.
const KernelSet& active();

}  // namespace zkb::kernels
