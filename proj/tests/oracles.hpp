#pragma once

// Independent numerical references used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  // Split first so that symmetric integrands cannot fool the initial estimate.
  constexpr int kPanels = 16;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + (b - a) * p / kPanels, hi = a + (b - a) * (p + 1) / kPanels;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / kPanels, 40);
  }
  return total;
}

/// Composite trapezoid with n intervals (spectrally accurate for rapidly decaying smooth integrands).
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

inline double mode(int j, double y, double B) {
  return std::sqrt(2.0 / B) * std::sin(j * std::numbers::pi * y / B);
}

}  // namespace oracle
