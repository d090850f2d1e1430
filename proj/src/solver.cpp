#include "zkb/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "ygrid.hpp"
#include "zkb/diagnostics.hpp"
#include "zkb/kernels.hpp"

namespace zkb {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Scheme s) {
  return s == Scheme::ExponentialRK4 ? "exponential-RK4" : "IMEX-CNAB2";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "exponential-RK4") return Scheme::ExponentialRK4;
  if (name == "IMEX-CNAB2") return Scheme::ImexCnab2;
  throw ConfigError("unknown scheme: " + std::string(name));
}

std::string_view to_string(DissipationMode m) { return m == DissipationMode::PerStep ? "step" : "snapshot"; }

DissipationMode parse_dissipation_mode(std::string_view name) {
  if (name == "step") return DissipationMode::PerStep;
  if (name == "snapshot") return DissipationMode::PerSnapshot;
  throw ConfigError("unknown dissipation accumulation: " + std::string(name));
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Clean: return "clean";
    case RunStatus::Contaminated: return "contaminated";
    default: return "blow-up";
  }
}

RunStatus parse_run_status(std::string_view name) {
  if (name == "clean") return RunStatus::Clean;
  if (name == "contaminated") return RunStatus::Contaminated;
  if (name == "blow-up") return RunStatus::BlowUp;
  throw ConfigError("unknown run status: " + std::string(name));
}

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::GaussianMode: return "gaussian_mode";
    case InitialKind::SingleMode: return "single_mode";
    default: return "custom_samples";
  }
}

InitialKind parse_initial_kind(std::string_view name) {
  if (name == "gaussian_mode") return InitialKind::GaussianMode;
  if (name == "single_mode") return InitialKind::SingleMode;
  if (name == "custom_samples") return InitialKind::CustomSamples;
  throw ConfigError("unknown initial kind: " + std::string(name));
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
  if (output_every < 1) throw DomainError("output_every must be >= 1");
  if (convection != 0 && convection != 1) throw DomainError("convection must be 0 or 1");
  if (!(absorber >= 0.0) || !std::isfinite(absorber)) throw DomainError("absorber rate must be >= 0");
  if (absorber * dt > 2.5) throw DomainError("absorber rate too large for dt (absorber * dt must be <= 2.5)");
}

std::size_t SolverConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

// ---------------------------------------------------------------------------
// Initial data and linear symbol

InitialField make_initial_field(const InitialData& spec, const StripGeometry& geom) {
  const std::size_t nx = geom.nx(), ny = geom.ny();
  std::vector<double> vals(geom.size(), 0.0);
  if (spec.kind != InitialKind::CustomSamples) {
    if (spec.mode < 1 || static_cast<std::size_t>(spec.mode) > ny) {
      throw DomainError("initial mode j must lie in [1, Ny]");
    }
    if (!std::isfinite(spec.amplitude)) throw DomainError("amplitude must be finite");
  }
  switch (spec.kind) {
    case InitialKind::GaussianMode: {
      if (!(spec.width > 0.0)) throw DomainError("gaussian width must be positive");
      for (std::size_t m = 0; m < ny; ++m) {
        const double wy = evaluate_mode(spec.mode, geom.y(m), geom.width());
        for (std::size_t i = 0; i < nx; ++i) {
          const double r = (geom.x(i) - spec.x0) / spec.width;
          vals[m * nx + i] = spec.amplitude * std::exp(-r * r) * wy;
        }
      }
      break;
    }
    case InitialKind::SingleMode: {
      const double index = spec.wavenumber * geom.half_length() / kPi;
      const double rounded = std::round(index);
      if (std::fabs(index - rounded) > 1e-9 * std::max(1.0, std::fabs(index)) ||
          std::fabs(rounded) >= static_cast<double>(nx / 2)) {
        throw DomainError("wavenumber is not a representable multiple of pi/Lx");
      }
      for (std::size_t m = 0; m < ny; ++m) {
        const double wy = evaluate_mode(spec.mode, geom.y(m), geom.width());
        for (std::size_t i = 0; i < nx; ++i) {
          vals[m * nx + i] = spec.amplitude * std::sin(spec.wavenumber * geom.x(i)) * wy;
        }
      }
      break;
    }
    case InitialKind::CustomSamples: {
      if (spec.samples.size() != geom.size()) {
        throw ShapeError("custom_samples expects " + std::to_string(geom.size()) + " values");
      }
      vals = spec.samples;
      break;
    }
  }
  Field field(geom, std::move(vals));
  if (!field.all_finite()) throw NumericError("initial data contains non-finite values");

  double norm = std::sqrt(weighted_inner(0.0, field, field));
  if (spec.target_norm) {
    if (!(*spec.target_norm >= 0.0)) throw DomainError("target norm must be >= 0");
    if (norm == 0.0 && *spec.target_norm > 0.0) throw DomainError("cannot rescale a zero initial field");
    if (norm > 0.0) {
      const double s = *spec.target_norm / norm;
      for (double& v : field.values()) v *= s;
      norm = std::sqrt(weighted_inner(0.0, field, field));
    }
  }
  const double tail = tail_mass(field, geom.weight_rate());
  if (spec.kind != InitialKind::SingleMode && tail > kInitialTailLimit) {
    throw DomainError("support too wide for truncation (initial tail mass " + describe(tail) + ")");
  }
  return {std::move(field), norm, tail};
}

cplx linear_symbol(double k, double lambda, int convection) {
  if (!(lambda >= 0.0)) throw DomainError("eigenvalue must be >= 0");
  return {-k * k, k * (k * k + lambda - static_cast<double>(convection))};
}

BlowUpError::BlowUpError(double t, double l2, const std::string& reason)
    : NumericError("blow-up at t=" + describe(t) + ": " + reason), t_(t), l2_(l2), reason_(reason) {}

// ---------------------------------------------------------------------------
// Nonlinear term

struct NonlinearOperator::Impl {
  StripGeometry geom;
  std::size_t rows;
  std::size_t active;  // retained wavenumber count
  std::vector<double> synth;
  std::vector<double> proj;
  std::vector<cplx> deriv;  // i k / (2 Nx) for the retained wavenumbers
  fft::ComplexBuffer fine_spec;
  fft::RealBuffer fine_phys;
  fft::Plan c2r;
  fft::Plan r2c;

  Impl(const StripGeometry& g, bool dealias)
      : geom(g),
        rows(detail::fine_intervals(g.ny()) - 1),
        active(dealias ? g.dealiased_nk() : g.nk()),
        synth(detail::sine_synthesis_matrix(g.width(), g.ny(), detail::fine_intervals(g.ny()))),
        proj(detail::sine_projection_matrix(g.width(), g.ny(), detail::fine_intervals(g.ny()))),
        deriv(active),
        fine_spec(rows * g.nk()),
        fine_phys(rows * g.nx()) {
    const std::size_t nyq = g.nx() / 2;
    for (std::size_t n = 0; n < active; ++n) {
      deriv[n] = (n == nyq) ? cplx{} : cplx{0.0, g.wavenumber(n) / (2.0 * static_cast<double>(g.nx()))};
    }
    c2r = fft::make_c2r_rows(g.nx(), rows, fine_spec.data(), fine_phys.data());
    r2c = fft::make_r2c_rows(g.nx(), rows, fine_phys.data(), fine_spec.data());
  }
};

NonlinearOperator::NonlinearOperator(const StripGeometry& geom, bool dealias)
    : impl_(std::make_unique<Impl>(geom, dealias)) {}
NonlinearOperator::~NonlinearOperator() = default;
NonlinearOperator::NonlinearOperator(NonlinearOperator&&) noexcept = default;
NonlinearOperator& NonlinearOperator::operator=(NonlinearOperator&&) noexcept = default;

double NonlinearOperator::max_wavenumber() const {
  return impl_->geom.wavenumber(impl_->active - 1);
}

void NonlinearOperator::apply(const SpectralField& u, SpectralField& out) {
  Impl& s = *impl_;
  if (!u.geometry().same_grid(s.geom) || !out.geometry().same_grid(s.geom)) {
    throw ShapeError("nonlinear operator grid mismatch");
  }
  const auto& k = kernels::active();
  const std::size_t nk = s.geom.nk(), ny = s.geom.ny(), nx = s.geom.nx();
  const std::size_t ld = 2 * nk;

  // Sine synthesis onto the fine y grid, wavenumber by wavenumber.
  k.matmul(s.synth.data(), ny, reinterpret_cast<const double*>(u.coeffs().data()), ld,
           reinterpret_cast<double*>(s.fine_spec.data()), ld, s.rows, ny, 2 * s.active);
  if (s.active < nk) {
    for (std::size_t r = 0; r < s.rows; ++r) {
      std::fill(s.fine_spec.data() + r * nk + s.active, s.fine_spec.data() + (r + 1) * nk, cplx{});
    }
  }
  s.c2r.execute();
  last_max_ = k.max_abs(s.fine_phys.data(), s.rows * nx);
  k.square(s.fine_phys.data(), s.rows * nx);
  s.r2c.execute();

  // Exact projection of u^2 onto the sine modes, then d/dx / 2 with the 1/Nx normalization.
  cplx* dst = out.coeffs().data();
  k.matmul(s.proj.data(), s.rows, reinterpret_cast<const double*>(s.fine_spec.data()), ld,
           reinterpret_cast<double*>(dst), ld, ny, s.rows, 2 * s.active);
  for (std::size_t j = 0; j < ny; ++j) {
    cplx* row = dst + j * nk;
    for (std::size_t n = 0; n < s.active; ++n) row[n] *= s.deriv[n];
    std::fill(row + s.active, row + nk, cplx{});
  }
}

Field nonlinear_term(const Field& u, bool dealias) {
  if (!u.all_finite()) throw NumericError("nonlinear_term: non-finite input");
  SpectralTransform tr(u.geometry());
  NonlinearOperator op(u.geometry(), dealias);
  SpectralField su = tr.forward(u);
  SpectralField out(u.geometry());
  op.apply(su, out);
  Field result = tr.inverse(out);
  if (!result.all_finite()) throw NumericError("nonlinear_term: non-finite result");
  return result;
}

// ---------------------------------------------------------------------------
// Damping layer

std::vector<double> absorber_profile(const StripGeometry& geom, double peak) {
  std::vector<double> sigma(geom.nx(), 0.0);
  const double L = geom.half_length(), band = 0.2 * L;
  for (std::size_t i = 0; i < geom.nx(); ++i) {
    const double x = geom.x(i);
    if (x < -0.8 * L) {
      const double s = std::sin(kPi * (x + L) / band);
      sigma[i] = peak * s * s;
    }
  }
  return sigma;
}

namespace {

// out -= coefficients of sigma(x) u, computed mode by mode on the x grid.
class Absorber {
 public:
  Absorber(const StripGeometry& g, double peak, std::size_t active)
      : geom_(g),
        active_(active),
        sigma_(absorber_profile(g, peak)),
        spec_(g.ny() * g.nk()),
        phys_(g.ny() * g.nx()),
        c2r_(fft::make_c2r_rows(g.nx(), g.ny(), spec_.data(), phys_.data())),
        r2c_(fft::make_r2c_rows(g.nx(), g.ny(), phys_.data(), spec_.data())) {}

  /// Returns 2 (sigma, u^2).
  double apply(const SpectralField& v, SpectralField& out) {
    const std::size_t nx = geom_.nx(), nk = geom_.nk(), ny = geom_.ny();
    std::copy(v.coeffs().begin(), v.coeffs().end(), spec_.data());
    c2r_.execute();
    const double inv = 1.0 / static_cast<double>(nx);
    double rate = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      double* row = phys_.data() + j * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        rate += sigma_[i] * row[i] * row[i];
        row[i] *= sigma_[i] * inv;
      }
    }
    r2c_.execute();
    cplx* dst = out.coeffs().data();
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t n = 0; n < active_; ++n) dst[j * nk + n] -= spec_[j * nk + n];
    }
    return 2.0 * rate * geom_.dx();
  }

 private:
  StripGeometry geom_;
  std::size_t active_;
  std::vector<double> sigma_;
  fft::ComplexBuffer spec_;
  fft::RealBuffer phys_;
  fft::Plan c2r_;
  fft::Plan r2c_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Time stepping

namespace {

// phi-type coefficients of the fourth-order exponential Runge-Kutta scheme,
// by contour averaging around h*sigma (accurate near sigma = 0 as well).
struct EtdCoefficients {
  cplx e, e2, q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(cplx z, double h) {
  constexpr int kPoints = 32;
  EtdCoefficients c{std::exp(z), std::exp(0.5 * z), {}, {}, {}, {}};
  for (int m = 0; m < kPoints; ++m) {
    const cplx r = std::polar(1.0, 2.0 * kPi * (m + 0.5) / kPoints);
    const cplx zr = z + r;
    const cplx ez = std::exp(zr);
    const cplx z3 = zr * zr * zr;
    c.q += (std::exp(0.5 * zr) - 1.0) / zr;
    c.f1 += (-4.0 - zr + ez * (4.0 - 3.0 * zr + zr * zr)) / z3;
    c.f2 += (2.0 + zr + ez * (zr - 2.0)) / z3;
    c.f3 += (-4.0 - 3.0 * zr - zr * zr + ez * (4.0 - zr)) / z3;
  }
  const double w = h / kPoints;
  c.q *= w;
  c.f1 *= w;
  c.f2 *= w;
  c.f3 *= w;
  // Real modes must stay real.
  if (z.imag() == 0.0) {
    c.q.imag(0.0);
    c.f1.imag(0.0);
    c.f2.imag(0.0);
    c.f3.imag(0.0);
  }
  return c;
}

}  // namespace

struct Stepper::Impl {
  StripGeometry geom;
  SolverConfig cfg;
  NonlinearOperator nonlinear;
  std::unique_ptr<Absorber> absorber;
  std::size_t n;  // coefficient count
  // ETDRK4 tables
  std::vector<cplx> e, e2, q, f1, f2, f3;
  // CNAB2 tables
  std::vector<cplx> cn_gain, cn_forcing;
  bool have_history = false;
  SpectralField nv, na, nb, nc, a, b, c, tmp, history;
  double courant = 0.0;
  double absorbed_rate = 0.0;

  Impl(const StripGeometry& g, const SolverConfig& c_)
      : geom(g),
        cfg(c_),
        nonlinear(g, c_.dealias),
        n(g.ny() * g.nk()),
        nv(g), na(g), nb(g), nc(g), a(g), b(g), c(g), tmp(g), history(g) {
    cfg.validate();
    if (cfg.absorber > 0.0) {
      absorber = std::make_unique<Absorber>(g, cfg.absorber, cfg.dealias ? g.dealiased_nk() : g.nk());
    }
    const std::size_t nk = g.nk(), nyq = g.nx() / 2;
    const double h = cfg.dt;
    if (cfg.scheme == Scheme::ExponentialRK4) {
      e.resize(n); e2.resize(n); q.resize(n); f1.resize(n); f2.resize(n); f3.resize(n);
    } else {
      cn_gain.resize(n);
      cn_forcing.resize(n);
    }
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double lambda = eigenvalue(static_cast<int>(j) + 1, g.width());
      for (std::size_t idx = 0; idx < nk; ++idx) {
        cplx sigma = linear_symbol(g.wavenumber(idx), lambda, cfg.convection);
        if (idx == nyq) sigma.imag(0.0);
        const std::size_t at = j * nk + idx;
        if (cfg.scheme == Scheme::ExponentialRK4) {
          const EtdCoefficients ec = etd_coefficients(h * sigma, h);
          e[at] = ec.e; e2[at] = ec.e2; q[at] = ec.q; f1[at] = ec.f1; f2[at] = ec.f2; f3[at] = ec.f3;
        } else {
          const cplx denom = 1.0 - 0.5 * h * sigma;
          cn_gain[at] = (1.0 + 0.5 * h * sigma) / denom;
          cn_forcing[at] = h / denom;
        }
      }
    }
  }

  // out = -(u u_x) - sigma u, with the Courant guard on the first evaluation of a step.
  void forcing(const SpectralField& v, SpectralField& out, bool guard, double t) {
    if (cfg.nonlinear) {
      nonlinear.apply(v, out);
    } else {
      std::fill(out.coeffs().begin(), out.coeffs().end(), cplx{});
    }
    if (guard && cfg.nonlinear) {
      courant = cfg.dt * nonlinear.max_wavenumber() * nonlinear.last_max_abs();
      if (!(courant <= kCourantLimit)) {
        throw BlowUpError(t, v.l2_squared(),
                          "nonlinear Courant number " + describe(courant) + " exceeds " + describe(kCourantLimit));
      }
    }
    out *= -1.0;
    if (absorber) {
      const double rate = absorber->apply(v, out);
      if (guard) absorbed_rate = rate;
    }
  }

  void step_etd(SpectralField& v, double t) {
    const auto& k = kernels::active();
    cplx* vp = v.coeffs().data();
    if (!cfg.nonlinear && !absorber) {
      k.cmul(e.data(), vp, vp, n);
      return;
    }
    forcing(v, nv, true, t);
    // a = e2 v + q Nv
    k.cmul(e2.data(), vp, a.coeffs().data(), n);
    k.cmul_add(q.data(), nv.coeffs().data(), a.coeffs().data(), n);
    forcing(a, na, false, t);
    // b = e2 v + q Na
    k.cmul(e2.data(), vp, b.coeffs().data(), n);
    k.cmul_add(q.data(), na.coeffs().data(), b.coeffs().data(), n);
    forcing(b, nb, false, t);
    // c = e2 a + q (2 Nb - Nv)
    {
      cplx* tp = tmp.coeffs().data();
      const cplx* nbp = nb.coeffs().data();
      const cplx* nvp = nv.coeffs().data();
      for (std::size_t i = 0; i < n; ++i) tp[i] = 2.0 * nbp[i] - nvp[i];
    }
    k.cmul(e2.data(), a.coeffs().data(), c.coeffs().data(), n);
    k.cmul_add(q.data(), tmp.coeffs().data(), c.coeffs().data(), n);
    forcing(c, nc, false, t);
    // v = e v + f1 Nv + 2 f2 (Na + Nb) + f3 Nc
    {
      cplx* tp = tmp.coeffs().data();
      const cplx* nap = na.coeffs().data();
      const cplx* nbp = nb.coeffs().data();
      for (std::size_t i = 0; i < n; ++i) tp[i] = 2.0 * (nap[i] + nbp[i]);
    }
    k.cmul(e.data(), vp, vp, n);
    k.cmul_add(f1.data(), nv.coeffs().data(), vp, n);
    k.cmul_add(f2.data(), tmp.coeffs().data(), vp, n);
    k.cmul_add(f3.data(), nc.coeffs().data(), vp, n);
  }

  void step_cnab(SpectralField& v, double t) {
    const auto& k = kernels::active();
    cplx* vp = v.coeffs().data();
    if (!cfg.nonlinear && !absorber) {
      k.cmul(cn_gain.data(), vp, vp, n);
      return;
    }
    forcing(v, nv, true, t);
    cplx* tp = tmp.coeffs().data();
    const cplx* nvp = nv.coeffs().data();
    if (have_history) {
      const cplx* hp = history.coeffs().data();
      for (std::size_t i = 0; i < n; ++i) tp[i] = 1.5 * nvp[i] - 0.5 * hp[i];
    } else {
      std::copy(nvp, nvp + n, tp);
    }
    k.cmul(cn_gain.data(), vp, vp, n);
    k.cmul_add(cn_forcing.data(), tp, vp, n);
    std::swap(history, nv);
    have_history = true;
  }
};

Stepper::Stepper(const StripGeometry& geom, const SolverConfig& cfg) : impl_(std::make_unique<Impl>(geom, cfg)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::step(SpectralField& v, double t) {
  if (!v.geometry().same_grid(impl_->geom)) throw ShapeError("stepper grid mismatch");
  if (impl_->cfg.scheme == Scheme::ExponentialRK4) {
    impl_->step_etd(v, t);
  } else {
    impl_->step_cnab(v, t);
  }
}

void Stepper::reset() { impl_->have_history = false; }
const SolverConfig& Stepper::config() const { return impl_->cfg; }
double Stepper::last_courant() const { return impl_->courant; }
double Stepper::last_absorbed_rate() const { return impl_->absorbed_rate; }

Field step(const Field& state, double t, const SolverConfig& cfg) {
  SpectralTransform tr(state.geometry());
  Stepper stepper(state.geometry(), cfg);
  SpectralField v = tr.forward(state);
  stepper.step(v, t);
  Field out = tr.inverse(v);
  if (!out.all_finite()) throw BlowUpError(t + cfg.dt, v.l2_squared(), "non-finite values");
  return out;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

/// Per-coefficient contributions to ||u_x||^2.
std::vector<double> dx_spectrum(const SpectralField& v) {
  const StripGeometry& g = v.geometry();
  const std::size_t nk = g.nk(), nyq = g.nx() / 2;
  std::vector<double> out(g.ny() * nk);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t n = 0; n < nk; ++n) {
      const double mult = (n == 0 || n == nyq) ? 1.0 : 2.0;
      const double k = g.wavenumber(n);
      out[j * nk + n] = 2.0 * g.half_length() * mult * k * k * std::norm(v(j, n));
    }
  }
  return out;
}

/// Mean of a quantity over a step assuming it varies exponentially between the end values.
double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return 0.5 * (a + b);
  const double r = b / a;
  if (std::fabs(r - 1.0) < 1e-4) {
    const double e = r - 1.0;
    return a * (1.0 + e / 2.0 - e * e / 12.0 + e * e * e / 24.0);
  }
  return (b - a) / std::log(r);
}

}  // namespace

TimeSeries run(const Field& u0, const SolverConfig& cfg) {
  cfg.validate();
  const StripGeometry& geom = u0.geometry();
  if (!u0.all_finite()) throw NumericError("initial field has non-finite values");

  TimeSeries series(geom);
  series.config = cfg;
  SpectralTransform transform(geom);
  NormEvaluator norms(geom);
  Stepper stepper(geom, cfg);

  SpectralField v = transform.forward(u0);
  const double l2_0 = v.l2_squared();
  std::vector<double> dx_modes_prev, dx_modes;
  if (cfg.dissipation == DissipationMode::PerStep) dx_modes_prev = dx_spectrum(v);
  double dx_prev_snap = v.dx_l2_squared();
  double t_prev_snap = 0.0;
  double diss = 0.0;

  auto record = [&](double t) {
    NormSample s = norms.sample(v, t, diss);
    if (cfg.tail_guard && s.tail > kContaminationTail && series.status == RunStatus::Clean) {
      series.status = RunStatus::Contaminated;
      series.contaminated_at = t;
    }
    series.samples.push_back(s);
    if (cfg.store_snapshots) series.snapshots.push_back(transform.inverse(v));
  };
  auto fail = [&](double t, double l2, const std::string& reason) {
    series.status = RunStatus::BlowUp;
    series.blowup_time = t;
    series.blowup_reason = reason;
    BlowUpError err(t, l2, reason);
    err.partial = std::make_shared<const TimeSeries>(series);
    return err;
  };

  record(0.0);
  const std::size_t steps = cfg.steps();
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_from = static_cast<double>(n - 1) * cfg.dt;
    try {
      stepper.step(v, t_from);
    } catch (const BlowUpError& e) {
      throw fail(e.time(), e.last_l2(), e.reason());
    }
    series.absorbed += cfg.dt * stepper.last_absorbed_rate();
    const double t = static_cast<double>(n) * cfg.dt;
    const double l2 = v.l2_squared();
    const double dxl2 = v.dx_l2_squared();
    if (!std::isfinite(l2) || !std::isfinite(dxl2)) throw fail(t, l2, "non-finite values");
    if (l2_0 > 0.0 && l2 > 1e12 * l2_0) throw fail(t, l2, "||u|| exceeded 1e6 ||u0||");
    if (cfg.dissipation == DissipationMode::PerStep) {
      dx_modes = dx_spectrum(v);
      double step_diss = 0.0;
      for (std::size_t i = 0; i < dx_modes.size(); ++i) step_diss += log_mean(dx_modes_prev[i], dx_modes[i]);
      diss += 2.0 * cfg.dt * step_diss;
      std::swap(dx_modes_prev, dx_modes);
    }
    if (n % cfg.output_every == 0 || n == steps) {
      if (cfg.dissipation == DissipationMode::PerSnapshot) {
        diss += (t - t_prev_snap) * (dx_prev_snap + dxl2);
      }
      dx_prev_snap = dxl2;
      t_prev_snap = t;
      record(t);
    }
  }
  return series;
}

}  // namespace zkb
