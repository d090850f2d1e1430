#include "zkb/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <string>
#include <tuple>

#include "fft.hpp"
#include "zkb/errors.hpp"

namespace zkb {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of sin(n theta) over (0, pi).
double sine_integral(int n) {
  if (n == 0) return 0.0;
  return (n % 2 == 0) ? 0.0 : 2.0 / static_cast<double>(n);
}

}  // namespace

StripGeometry::StripGeometry(double B, double Lx, std::size_t Nx, std::size_t Ny, double b)
    : B_(B), Lx_(Lx), Nx_(Nx), Ny_(Ny), b_(b) {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("strip width B must be positive");
  if (!(Lx > 0.0) || !std::isfinite(Lx)) throw DomainError("half-length Lx must be positive");
  if (Nx < 4 || Nx % 2 != 0) throw DomainError("Nx must be even and >= 4, got " + std::to_string(Nx));
  if (Ny < 1) throw DomainError("Ny must be >= 1");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("weight rate b must be >= 0");
}

StripGeometry StripGeometry::with_weight_rate(double b) const { return StripGeometry(B_, Lx_, Nx_, Ny_, b); }

bool StripGeometry::same_grid(const StripGeometry& o) const {
  return B_ == o.B_ && Lx_ == o.Lx_ && Nx_ == o.Nx_ && Ny_ == o.Ny_;
}

double eigenvalue(int j, double B) {
  if (j < 1) throw DomainError("mode index must be >= 1");
  if (!(B > 0.0)) throw DomainError("strip width B must be positive");
  const double r = static_cast<double>(j) * kPi / B;
  return r * r;
}

double evaluate_mode(int j, double y, double B) {
  if (j < 1) throw DomainError("mode index must be >= 1");
  if (!(B > 0.0)) throw DomainError("strip width B must be positive");
  if (!(y >= 0.0 && y <= B)) throw DomainError("y outside [0, B]");
  return std::sqrt(2.0 / B) * std::sin(static_cast<double>(j) * kPi * y / B);
}

double coupling_coefficient(int i, int j, int k, double B) {
  if (i < 1 || j < 1 || k < 1) throw DomainError("mode indices must be >= 1");
  if (!(B > 0.0)) throw DomainError("strip width B must be positive");
  std::array<int, 3> m{i, j, k};
  std::sort(m.begin(), m.end());
  std::tie(i, j, k) = std::tie(m[0], m[1], m[2]);
  // sin a sin b sin c = [sin(a+b-c) + sin(b+c-a) + sin(c+a-b) - sin(a+b+c)] / 4
  const double angular =
      0.25 * (sine_integral(i + j - k) + sine_integral(j + k - i) + sine_integral(k + i - j) - sine_integral(i + j + k));
  const double norm = std::sqrt(2.0 / B);
  return norm * norm * norm * (B / kPi) * angular;
}

DirichletBasis::DirichletBasis(double B, std::size_t count) : B_(B) {
  if (!(B > 0.0)) throw DomainError("strip width B must be positive");
  modes_.reserve(count);
  const double norm = std::sqrt(2.0 / B);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const int j = static_cast<int>(idx) + 1;
    modes_.push_back({j, eigenvalue(j, B), norm});
  }
}

std::vector<double> DirichletBasis::sample(std::size_t idx) const {
  const std::size_t n = modes_.size();
  std::vector<double> out(n);
  const double j = static_cast<double>(modes_.at(idx).j);
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = modes_[idx].normalization * std::sin(j * kPi * static_cast<double>(m + 1) / static_cast<double>(n + 1));
  }
  return out;
}

struct SineTransform::Impl {
  mutable fft::RealBuffer buffer;
  fft::Plan plan;
  mutable std::mutex mutex;
};

SineTransform::SineTransform(double B, std::size_t Ny) : B_(B), Ny_(Ny), impl_(std::make_unique<Impl>()) {
  if (!(B > 0.0)) throw DomainError("strip width B must be positive");
  if (Ny < 1) throw DomainError("Ny must be >= 1");
  impl_->buffer = fft::RealBuffer(Ny);
  impl_->plan = fft::make_dst_columns(Ny, 1, impl_->buffer.data());
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

std::vector<double> SineTransform::apply(std::span<const double> in, double scale) const {
  if (in.size() != Ny_) {
    throw ShapeError("sine transform expects " + std::to_string(Ny_) + " values, got " + std::to_string(in.size()));
  }
  std::lock_guard lock(impl_->mutex);
  std::copy(in.begin(), in.end(), impl_->buffer.data());
  impl_->plan.execute();
  std::vector<double> out(Ny_);
  for (std::size_t m = 0; m < Ny_; ++m) out[m] = scale * impl_->buffer[m];
  return out;
}

// RODFT00 computes Y_k = 2 sum_n X_n sin(pi (n+1)(k+1) / (N+1)).
std::vector<double> SineTransform::forward(std::span<const double> values) const {
  const double dy = B_ / static_cast<double>(Ny_ + 1);
  return apply(values, 0.5 * dy * std::sqrt(2.0 / B_));
}

std::vector<double> SineTransform::inverse(std::span<const double> coeffs) const {
  return apply(coeffs, 0.5 * std::sqrt(2.0 / B_));
}

}  // namespace zkb
