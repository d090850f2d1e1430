#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace zkb {

/// Truncated channel: x in [-Lx, Lx) periodic, y in (0, B) with Dirichlet walls.
///
/// The x grid is uniform with Nx points starting at -Lx; the y grid is the
/// Ny interior points y_m = m B / (Ny + 1), m = 1..Ny, on which the sine
/// basis satisfies the wall conditions exactly.
class StripGeometry {
 public:
  StripGeometry(double B, double Lx, std::size_t Nx, std::size_t Ny, double b = 0.0);

  double width() const { return B_; }
  double half_length() const { return Lx_; }
  std::size_t nx() const { return Nx_; }
  std::size_t ny() const { return Ny_; }
  double weight_rate() const { return b_; }

  /// Same grid, different exponential weight.
  StripGeometry with_weight_rate(double b) const;

  double dx() const { return 2.0 * Lx_ / static_cast<double>(Nx_); }
  double dy() const { return B_ / static_cast<double>(Ny_ + 1); }
  double x(std::size_t i) const { return -Lx_ + static_cast<double>(i) * dx(); }
  /// Zero-based index: y(0) is the first interior point.
  double y(std::size_t m) const { return static_cast<double>(m + 1) * dy(); }

  /// Number of stored r2c wavenumbers, Nx/2 + 1.
  std::size_t nk() const { return Nx_ / 2 + 1; }
  /// Physical wavenumber of Fourier index n: n pi / Lx.
  double wavenumber(std::size_t n) const { return static_cast<double>(n) * std::numbers::pi / Lx_; }
  /// Count of wavenumbers retained by the 2/3 rule (indices n with 3n < Nx).
  std::size_t dealiased_nk() const { return (Nx_ + 2) / 3; }

  std::size_t size() const { return Nx_ * Ny_; }

  /// Grids match (weight rate ignored).
  bool same_grid(const StripGeometry& other) const;
  bool operator==(const StripGeometry&) const = default;

 private:
  double B_;
  double Lx_;
  std::size_t Nx_;
  std::size_t Ny_;
  double b_;
};

/// lambda_j = (j pi / B)^2.
double eigenvalue(int j, double B);

/// w_j(y) = sqrt(2/B) sin(j pi y / B).
double evaluate_mode(int j, double y, double B);

/// T_ijk = integral over (0,B) of w_i w_j w_k, in closed form.
double coupling_coefficient(int i, int j, int k, double B);

struct DirichletMode {
  int j;
  double lambda;
  double normalization;
};

/// Orthonormal eigenbasis of -d^2/dy^2 on (0,B) with Dirichlet ends, modes 1..count.
class DirichletBasis {
 public:
  DirichletBasis(double B, std::size_t count);

  double width() const { return B_; }
  std::size_t size() const { return modes_.size(); }
  const DirichletMode& operator[](std::size_t idx) const { return modes_[idx]; }
  std::span<const DirichletMode> modes() const { return modes_; }

  /// Samples of mode idx (zero-based, j = idx + 1) on the interior grid of
  /// a geometry with the same width and Ny = size().
  std::vector<double> sample(std::size_t idx) const;

 private:
  double B_;
  std::vector<DirichletMode> modes_;
};

/// Discrete projection onto the sine basis on the uniform interior y grid.
///
/// forward: c_j = dy * sum_m u_m w_j(y_m), the rectangle-rule projection
/// (exact for sine polynomials of degree <= Ny). inverse: u_m = sum_j c_j w_j(y_m).
class SineTransform {
 public:
  SineTransform(double B, std::size_t Ny);
  ~SineTransform();
  SineTransform(SineTransform&&) noexcept;
  SineTransform& operator=(SineTransform&&) noexcept;

  std::vector<double> forward(std::span<const double> values) const;
  std::vector<double> inverse(std::span<const double> coeffs) const;

  std::size_t size() const { return Ny_; }

 private:
  std::vector<double> apply(std::span<const double> in, double scale) const;

  double B_;
  std::size_t Ny_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace zkb
