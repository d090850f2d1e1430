#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "zkb/kernels.hpp"

using namespace zkb::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  const auto re = random_vector(2 * n, seed);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[2 * i], re[2 * i + 1]};
  return v;
}

void check_matmul(const KernelSet& ks, std::size_t rows, std::size_t inner, std::size_t cols) {
  const std::size_t lda = inner + 3, ldb = cols + 5, ldc = cols + 2;
  const auto a = random_vector(rows * lda, 1 + rows);
  const auto b = random_vector(inner * ldb, 2 + cols);
  std::vector<double> c(rows * ldc, 7.0), ref(rows * ldc, 7.0);
  ks.matmul(a.data(), lda, b.data(), ldb, c.data(), ldc, rows, inner, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < cols; ++col) {
      long double s = 0.0L;
      for (std::size_t p = 0; p < inner; ++p) s += static_cast<long double>(a[r * lda + p]) * b[p * ldb + col];
      ref[r * ldc + col] = static_cast<double>(s);
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < ldc; ++col) {
      const double got = c[r * ldc + col];
      if (col < cols) {
        CHECK(std::fabs(got - ref[r * ldc + col]) <= 1e-14 * static_cast<double>(inner));
      } else {
        CHECK(got == 7.0);  // padding untouched
      }
    }
  }
}

void check_set(const KernelSet& ks) {
  CAPTURE(ks.name);
  const std::array<std::array<int, 3>, 6> shapes{{{1, 1, 1}, {3, 5, 7}, {4, 8, 8}, {9, 17, 33}, {65, 32, 684}, {32, 65, 13}}};
  for (auto [r, i, c] : shapes) {
    check_matmul(ks, r, i, c);
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 1029u}) {
    auto x = random_vector(n, n);
    auto y = x;
    ks.square(y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == x[i] * x[i]);

    const auto a = random_complex(n, 10 + n), z = random_complex(n, 20 + n);
    std::vector<cplx> out(n), acc = random_complex(n, 30 + n), acc0 = acc;
    ks.cmul(a.data(), z.data(), out.data(), n);
    ks.cmul_add(a.data(), z.data(), acc.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(out[i] - a[i] * z[i]) < 1e-15);
      CHECK(std::abs(acc[i] - (acc0[i] + a[i] * z[i])) < 1e-15);
    }
    // In-place use (out aliases x).
    auto inplace = z;
    ks.cmul(a.data(), inplace.data(), inplace.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(inplace[i] - a[i] * z[i]) < 1e-15);

    const auto w = random_vector(n, 40 + n), f = random_vector(n, 50 + n), g = random_vector(n, 60 + n);
    long double dot = 0.0L;
    for (std::size_t i = 0; i < n; ++i) dot += static_cast<long double>(w[i]) * f[i] * g[i];
    CHECK(std::fabs(ks.weighted_dot(w.data(), f.data(), g.data(), n) - static_cast<double>(dot)) < 1e-13);

    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    CHECK(ks.max_abs(x.data(), n) == m);
  }
  std::vector<double> with_nan = {1.0, -3.0, std::numeric_limits<double>::quiet_NaN(), 2.0, 0.5, 9.0, 1.0, 1.0, 1.0};
  CHECK(std::isnan(ks.max_abs(with_nan.data(), with_nan.size())));
  std::vector<double> with_inf = {1.0, -std::numeric_limits<double>::infinity(), 2.0};
  CHECK(std::isinf(ks.max_abs(with_inf.data(), with_inf.size())));
}

}  // namespace

TEST_CASE("scalar reference kernels") { check_set(scalar()); }

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelSet* v = avx2();
  if (!v) {
    MESSAGE("AVX2/FMA not available; variant skipped");
    return;
  }
  check_set(*v);
  // Direct cross-check on identical inputs.
  const std::size_t rows = 65, inner = 32, cols = 684;
  const auto a = random_vector(rows * inner, 5), b = random_vector(inner * cols, 6);
  std::vector<double> c1(rows * cols), c2(rows * cols);
  scalar().matmul(a.data(), inner, b.data(), cols, c1.data(), cols, rows, inner, cols);
  v->matmul(a.data(), inner, b.data(), cols, c2.data(), cols, rows, inner, cols);
  double worst = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i) worst = std::max(worst, std::fabs(c1[i] - c2[i]));
  CHECK(worst < 1e-13);
}

TEST_CASE("active kernel set is one of the variants") {
  const KernelSet& k = active();
  CHECK((&k == &scalar() || &k == avx2()));
}
