#pragma once

// Refined y quadrature shared by the nonlinear term and the quartic
// diagnostics. With M = 2(Ny+1) intervals on (0,B), the squares of sine
// polynomials of degree <= Ny are cosine polynomials of degree <= M, which
// the M+1 point cosine grid represents exactly; fourth powers are integrated
// exactly by the trapezoid rule on the same grid.

#include <cstddef>
#include <vector>

#include "fft.hpp"
#include "zkb/field.hpp"

namespace zkb::detail {

inline std::size_t fine_intervals(std::size_t ny) { return 2 * (ny + 1); }

/// (M-1) x Ny, row-major: value of w_j at interior fine point m.
std::vector<double> sine_synthesis_matrix(double B, std::size_t ny, std::size_t intervals);

/// Ny x (M-1), row-major: maps samples of a cosine polynomial of degree <= M
/// that vanishes at both walls to its exact projections onto w_1..w_Ny.
std::vector<double> sine_projection_matrix(double B, std::size_t ny, std::size_t intervals);

/// Samples x-derivatives of a spectral field on a grid refined 2x in x
/// (zero padding) and to the fine y grid above.
class FineSampler {
 public:
  explicit FineSampler(const StripGeometry& geom);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x(std::size_t i) const;

  /// rows() x cols() samples of d^p u / dx^p; interior fine points only (u vanishes on the walls).
  std::vector<double> sample(const SpectralField& s, int derivative);

 private:
  StripGeometry geom_;
  std::size_t rows_, cols_;
  double dx_, dy_;
  std::vector<double> synth_;
  fft::ComplexBuffer spec_;
  fft::RealBuffer prof_;
  fft::Plan c2r_;
};

}  // namespace zkb::detail
