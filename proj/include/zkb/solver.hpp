#pragma once

// Time integration of u_t - u_xx + u u_x + u_xxx + u_xyy (+ c u_x) = 0 on the
// truncated strip. Each (Fourier wavenumber k, sine mode j) pair evolves under
// the diagonal linear rate sigma(k, lambda_j); the quadratic term is formed on
// a refined quadrature grid so that its projection onto the retained sine
// modes is exact, and the x products are dealiased by the 2/3 rule.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zkb/errors.hpp"
#include "zkb/field.hpp"
#include "zkb/series.hpp"

namespace zkb {

enum class InitialKind { GaussianMode, SingleMode, CustomSamples };
std::string_view to_string(InitialKind k);
InitialKind parse_initial_kind(std::string_view name);

struct InitialData {
  InitialKind kind = InitialKind::GaussianMode;
  double amplitude = 1.0;
  double x0 = 0.0;
  double width = 1.0;
  int mode = 1;
  /// Physical wavenumber of single_mode data; must be a multiple of pi/Lx.
  double wavenumber = 1.0;
  /// When set, the amplitude is rescaled so that ||u0|| equals this value.
  std::optional<double> target_norm;
  std::vector<double> samples;
};

struct InitialField {
  Field field;
  double l2_norm;
  double tail;
};

/// Samples u0 on the grid. gaussian_mode: A exp(-(x-x0)^2/s^2) w_j(y);
/// single_mode: A sin(k x) w_j(y) (periodic, exempt from the tail check).
InitialField make_initial_field(const InitialData& spec, const StripGeometry& geom);

/// Rate sigma with d c / dt = sigma c for the mode exp(i k x) w_j: -k^2 + i k (k^2 + lambda - c).
cplx linear_symbol(double k, double lambda, int convection);

/// Raised when a run leaves the regime it can be trusted in.
class BlowUpError : public NumericError {
 public:
  BlowUpError(double t, double l2, const std::string& reason);
  double time() const { return t_; }
  double last_l2() const { return l2_; }
  const std::string& reason() const { return reason_; }

  /// Diagnostics recorded before the failure, when raised from run().
  std::shared_ptr<const TimeSeries> partial;

 private:
  double t_;
  double l2_;
  std::string reason_;
};

/// Spectral evaluation of u u_x.
class NonlinearOperator {
 public:
  NonlinearOperator(const StripGeometry& geom, bool dealias);
  ~NonlinearOperator();
  NonlinearOperator(NonlinearOperator&&) noexcept;
  NonlinearOperator& operator=(NonlinearOperator&&) noexcept;

  /// out = coefficients of u u_x.
  void apply(const SpectralField& u, SpectralField& out);
  /// max |u| over the quadrature grid during the last apply().
  double last_max_abs() const { return last_max_; }
  /// Largest wavenumber that enters the product.
  double max_wavenumber() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double last_max_ = 0.0;
};

/// N(u) = u u_x on the physical grid.
Field nonlinear_term(const Field& u, bool dealias = true);

/// Advances spectral states by one step of cfg.dt.
class Stepper {
 public:
  /// Nonlinear Courant number dt * k_max * max|u| above which a step is refused.
  static constexpr double kCourantLimit = 2.8;

  Stepper(const StripGeometry& geom, const SolverConfig& cfg);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// Advance v from time t to t + dt. Throws BlowUpError if the Courant guard trips.
  void step(SpectralField& v, double t);
  /// Forget multistep history (IMEX-CNAB2 restarts with a one-step start).
  void reset();

  const SolverConfig& config() const;
  double last_courant() const;
  /// 2 (sigma, u^2) at the start of the last step (0 without a damping layer).
  double last_absorbed_rate() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Profile sigma(x_i) of the damping layer with peak rate `peak`.
std::vector<double> absorber_profile(const StripGeometry& geom, double peak);

/// Convenience single step on a physical field.
Field step(const Field& state, double t, const SolverConfig& cfg);

/// Drives the stepper from u0 to cfg.t_end and records diagnostics every
/// cfg.output_every steps. Throws BlowUpError (with the partial series) on
/// non-finite values, ||u|| > 1e6 ||u0||, or a tripped Courant guard.
TimeSeries run(const Field& u0, const SolverConfig& cfg);

}  // namespace zkb
