#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zkb/field.hpp"
#include "zkb/geometry.hpp"

namespace zkb {

enum class Scheme { ExponentialRK4, ImexCnab2 };
enum class DissipationMode { PerSnapshot, PerStep };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);
std::string_view to_string(DissipationMode m);
DissipationMode parse_dissipation_mode(std::string_view name);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::ExponentialRK4;
  bool dealias = true;
  /// Coefficient of the u_x convection term; 0 is the analyzed form, 1 restores it.
  int convection = 0;
  std::size_t output_every = 1;
  /// Switch off u u_x entirely (linear runs).
  bool nonlinear = true;
  DissipationMode dissipation = DissipationMode::PerSnapshot;
  bool store_snapshots = false;
  /// Track the truncation tail and flag the run when it exceeds kContaminationTail.
  bool tail_guard = true;
  /// Peak rate of the damping layer -sigma(x) u on the left band x < -0.8 Lx
  /// (sin^2 profile, zero elsewhere). 0 disables it.
  double absorber = 0.0;

  void validate() const;
  std::size_t steps() const;
};

/// One diagnostic record. Squared quantities are integrals over the truncated strip.
struct NormSample {
  double t = 0.0;
  double l2 = 0.0;        // ||u||^2
  double diss_cum = 0.0;  // 2 int_0^t ||u_x||^2 ds
  double w_l2 = 0.0;      // (e^{2bx}, u^2)
  double w_h1 = 0.0;      // (e^{2bx}, u^2 + |grad u|^2)
  double sup_w = 0.0;     // max over the grid of |e^{bx} u|
  double tail = 0.0;      // weighted mass fraction in the outer bands
};

enum class RunStatus { Clean, Contaminated, BlowUp };
std::string_view to_string(RunStatus s);
RunStatus parse_run_status(std::string_view name);

struct TimeSeries {
  explicit TimeSeries(StripGeometry g) : geometry(g) {}

  StripGeometry geometry;
  SolverConfig config;
  std::string provenance;
  std::vector<NormSample> samples;
  std::vector<Field> snapshots;
  RunStatus status = RunStatus::Clean;
  std::optional<double> contaminated_at;
  std::optional<double> blowup_time;
  std::string blowup_reason;
  /// Energy removed by the damping layer, integral of 2 (sigma, u^2) dt (0 without one).
  double absorbed = 0.0;
};

/// Runs whose tail fraction exceeds this are flagged contaminated.
inline constexpr double kContaminationTail = 1e-6;
/// Initial data whose tail fraction exceeds this are rejected.
inline constexpr double kInitialTailLimit = 1e-8;

}  // namespace zkb
