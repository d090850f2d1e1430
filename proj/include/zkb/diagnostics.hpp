#pragma once

// Norms and functionals of the decay estimates, computed from spectral or
// physical fields. x integrals use the uniform trapezoid rule on the periodic
// grid; y integrals are evaluated through the sine basis (Parseval), which for
// sine-type integrands coincides with the interior rectangle rule.

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "zkb/errors.hpp"
#include "zkb/field.hpp"
#include "zkb/series.hpp"

namespace zkb {

/// Weighted pairings of one field; e denotes e^{2bx}.
struct WeightedNorms {
  double u = 0.0;     // (e, u^2)
  double ux = 0.0;    // (e, u_x^2)
  double uy = 0.0;    // (e, u_y^2)
  double uxy = 0.0;   // (e, u_xy^2)
  double sup = 0.0;   // max over the grid of |e^{bx} u|
  double tail = 0.0;  // tail mass fraction

  double h1() const { return u + ux + uy; }
};

/// Evaluates NormSample records for a fixed grid and weight rate.
class NormEvaluator {
 public:
  explicit NormEvaluator(const StripGeometry& geom);
  ~NormEvaluator();
  NormEvaluator(NormEvaluator&&) noexcept;
  NormEvaluator& operator=(NormEvaluator&&) noexcept;

  const StripGeometry& geometry() const { return geom_; }

  WeightedNorms weighted(const SpectralField& v);
  NormSample sample(const SpectralField& v, double t, double diss_cum);

 private:
  StripGeometry geom_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Quadrature of the integral of e^{2bx} f g over [-Lx, Lx) x (0, B).
double weighted_inner(double b, const Field& f, const Field& g);

/// Weighted pairings of a physical field with weight rate b.
WeightedNorms weighted_norms(const Field& u, double b);

/// Fraction of (e^{2bx}, u^2) carried by x < -0.8 Lx and x >= 0.8 Lx; 0 for the zero field.
double tail_mass(const Field& u, double b);
/// Same, from per-column sums c_i = integral over y of u(x_i, y)^2.
double tail_mass(const StripGeometry& geom, double b, std::span<const double> column_sums);

/// max over samples of |l2(t) + diss_cum(t) - l2(0)| / l2(0); 0 when l2(0) = 0.
double energy_residual(const TimeSeries& series);

/// The regular-solution functional
/// J0 = int u0^2 + e^{2bx} [u0^2 + |grad u0|^2 + |grad u0_x|^2 + u0^2 u0_x^2 + |Laplacian u0_x|^2].
double compute_J0(const Field& u0, double b);

enum class NormId { L2, WeightedL2, WeightedH1, WeightedSup };
std::string_view to_string(NormId id);
NormId parse_norm_id(std::string_view name);
double norm_value(const NormSample& s, NormId id);

struct DecayFit {
  double t0 = 0.0;
  double t1 = 0.0;
  double rate = 0.0;      // least-squares slope of -log(norm)
  double residual = 0.0;  // RMS deviation of log(norm) from the fitted line
  std::size_t count = 0;
  NormId norm = NormId::WeightedL2;
};

/// Fits over samples with t0 <= t <= t1. Requires t0 < t1 within the series
/// range, at least 10 samples in the window and positive values.
DecayFit fit_decay_rate(const TimeSeries& series, NormId norm, double t0, double t1);
/// Default window: the last half of the series.
DecayFit fit_decay_rate(const TimeSeries& series, NormId norm);
/// Fit on raw (t, value) pairs.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> values);

}  // namespace zkb
