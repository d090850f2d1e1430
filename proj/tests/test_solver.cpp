#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zkb/diagnostics.hpp"
#include "zkb/solver.hpp"
#include "zkb/theory.hpp"

using namespace zkb;
constexpr double kPi = std::numbers::pi;

namespace {

InitialData gaussian(double amplitude, double width, int mode = 1, double x0 = 0.0) {
  InitialData d;
  d.kind = InitialKind::GaussianMode;
  d.amplitude = amplitude;
  d.width = width;
  d.mode = mode;
  d.x0 = x0;
  return d;
}

InitialData single_mode(double amplitude, double k, int mode) {
  InitialData d;
  d.kind = InitialKind::SingleMode;
  d.amplitude = amplitude;
  d.wavenumber = k;
  d.mode = mode;
  return d;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
  return m;
}

double l2_diff(const Field& a, const Field& b) {
  const auto& g = a.geometry();
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    s += d * d;
  }
  return std::sqrt(s * g.dx() * g.dy());
}

Field evolve(const Field& u0, SolverConfig cfg) {
  SpectralTransform tr(u0.geometry());
  Stepper stepper(u0.geometry(), cfg);
  SpectralField v = tr.forward(u0);
  for (std::size_t n = 0; n < cfg.steps(); ++n) stepper.step(v, static_cast<double>(n) * cfg.dt);
  return tr.inverse(v);
}

}  // namespace

TEST_CASE("initial data examples") {
  StripGeometry wide(kPi, 10.0, 256, 8);
  const InitialField zero = make_initial_field(gaussian(0.0, 1.0), wide);
  CHECK(zero.l2_norm == 0.0);
  for (double v : zero.field.values()) CHECK(v == 0.0);

  StripGeometry periodic(kPi, kPi, 64, 8);
  const InitialField sm = make_initial_field(single_mode(1.0, 1.0, 1), periodic);
  CHECK(sm.l2_norm * sm.l2_norm == doctest::Approx(kPi).epsilon(1e-13));

  const InitialField gm = make_initial_field(gaussian(1.0, 1.0), wide);
  CHECK(gm.l2_norm * gm.l2_norm == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-13));
  CHECK(gm.tail < 1e-30);

  InitialData scaled = gaussian(3.0, 2.0, 2);
  scaled.target_norm = 0.16875;
  CHECK(make_initial_field(scaled, wide).l2_norm == doctest::Approx(0.16875).epsilon(1e-14));
}

TEST_CASE("initial data errors") {
  StripGeometry g(kPi, 10.0, 128, 4);
  try {
    make_initial_field(gaussian(1.0, 8.0), g);
    FAIL("expected rejection");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("support too wide for truncation") != std::string::npos);
  }
  CHECK_THROWS_AS(make_initial_field(gaussian(1.0, 1.0, 5), g), DomainError);
  CHECK_THROWS_AS(make_initial_field(gaussian(1.0, 1.0, 0), g), DomainError);
  CHECK_THROWS_AS(make_initial_field(single_mode(1.0, 1.0, 1), g), DomainError);  // 1 is not a multiple of pi/10
  CHECK_NOTHROW(make_initial_field(single_mode(1.0, kPi / 10.0 * 3.0, 1), g));
  InitialData custom;
  custom.kind = InitialKind::CustomSamples;
  custom.samples.assign(7, 0.0);
  CHECK_THROWS_AS(make_initial_field(custom, g), ShapeError);
  custom.samples.assign(g.size(), 0.0);
  custom.samples[3] = NAN;
  CHECK_THROWS_AS(make_initial_field(custom, g), NumericError);
}

TEST_CASE("linear symbol examples") {
  CHECK(linear_symbol(0.0, 3.0, 0) == cplx{0.0, 0.0});
  CHECK(linear_symbol(1.0, 1.0, 0) == cplx{-1.0, 2.0});
  CHECK(linear_symbol(2.0, 1.0, 0) == cplx{-4.0, 10.0});
  CHECK(linear_symbol(2.0, 1.0, 1) == cplx{-4.0, 8.0});
  CHECK_THROWS_AS(linear_symbol(1.0, -1.0, 0), DomainError);
}

TEST_CASE("nonlinear term: zero, skew symmetry and the coupling oracle") {
  StripGeometry g(kPi, kPi, 64, 8);
  const Field zero(g);
  const Field n0 = nonlinear_term(zero);
  for (double v : n0.values()) CHECK(v == 0.0);

  const Field u = make_initial_field(single_mode(1.0, 1.0, 1), g).field;
  const Field n = nonlinear_term(u);
  SpectralTransform tr(g);
  const SpectralField s = tr.forward(n);
  // u u_x = (1/2) sin(2x) w_1^2, so mode j carries (1/2) T_11j sin(2x).
  // With the phase origin at x = -pi, sin(2x) has coefficient 1/(2i) at n = 2.
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double expect = 0.5 * coupling_coefficient(1, 1, static_cast<int>(j) + 1, kPi);
    CHECK(std::fabs(-2.0 * s(j, 2).imag() - expect) < 1e-8);
    CHECK(std::fabs(s(j, 2).real()) < 1e-8);
    for (std::size_t k = 0; k < g.nk(); ++k) {
      if (k != 2) CHECK(std::abs(s(j, k)) < 1e-12);
    }
  }

  StripGeometry h(2.0, 12.0, 128, 10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field r = random_field(h, seed, 0);
    const Field nr = nonlinear_term(r);
    const double l2 = weighted_inner(0.0, r, r);
    CHECK(std::fabs(weighted_inner(0.0, nr, r)) < 1e-10 * std::pow(l2, 1.5) + 1e-14);
  }

  Field bad(g);
  bad(0, 0) = INFINITY;
  CHECK_THROWS_AS(nonlinear_term(bad), NumericError);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SolverConfig{};
  c.t_end = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SolverConfig{};
  c.output_every = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SolverConfig{};
  c.convection = 2;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SolverConfig{};
  c.absorber = 3000.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK(parse_scheme("IMEX-CNAB2") == Scheme::ImexCnab2);
  CHECK(to_string(Scheme::ExponentialRK4) == "exponential-RK4");
  CHECK_THROWS_AS(parse_scheme("rk45"), ConfigError);
}

TEST_CASE("single steps: zero state and exact linear mode") {
  StripGeometry g(kPi, kPi, 32, 4);
  SolverConfig cfg;
  cfg.dt = 0.01;
  const Field stepped = step(Field(g), 0.0, cfg);
  for (double v : stepped.values()) CHECK(v == 0.0);

  cfg.nonlinear = false;
  const Field u = make_initial_field(single_mode(1.0, 1.0, 1), g).field;
  SpectralTransform tr(g);
  const cplx before = tr.forward(u)(0, 1);
  const cplx after = tr.forward(step(u, 0.0, cfg))(0, 1);
  CHECK(std::abs(after) / std::abs(before) == doctest::Approx(std::exp(-cfg.dt)).epsilon(1e-13));
  CHECK(std::arg(after / before) == doctest::Approx(2.0 * cfg.dt).epsilon(1e-12));
}

TEST_CASE("linear runs evolve every mode by exp(sigma t)") {
  StripGeometry g(kPi, kPi, 32, 4);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.nonlinear = false;
  cfg.output_every = 100;
  cfg.tail_guard = false;
  for (double k : {1.0, 2.0}) {
    const TimeSeries ts = run(make_initial_field(single_mode(0.7, k, 1), g).field, cfg);
    CHECK(ts.samples.back().t == doctest::Approx(1.0));
    CHECK(ts.samples.back().l2 / ts.samples.front().l2 == doctest::Approx(std::exp(-2.0 * k * k)).epsilon(1e-11));
  }
  // Random multi-mode field against the closed form.
  const Field r = random_field(g, 3, 0);
  SpectralTransform tr(g);
  const SpectralField s0 = tr.forward(r);
  const SpectralField s1 = tr.forward(evolve(r, cfg));
  double worst = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t n = 0; n < g.nk(); ++n) {
      cplx sigma = linear_symbol(g.wavenumber(n), eigenvalue(static_cast<int>(j) + 1, kPi), 0);
      if (n == g.nx() / 2) sigma.imag(0.0);
      worst = std::max(worst, std::abs(s1(j, n) - s0(j, n) * std::exp(sigma)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("zero run stays zero") {
  StripGeometry g(kPi, 10.0, 64, 4);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.5;
  const TimeSeries ts = run(Field(g), cfg);
  CHECK(ts.samples.size() == 51);
  for (const auto& s : ts.samples) {
    CHECK(s.l2 == 0.0);
    CHECK(s.w_l2 == 0.0);
    CHECK(s.tail == 0.0);
  }
  CHECK(ts.status == RunStatus::Clean);
}

TEST_CASE("nonlinear run: monotone energy and the energy identity") {
  StripGeometry g(kPi, 30.0, 256, 8, 0.1);
  InitialData d = gaussian(1.0, 2.0);
  d.target_norm = 0.16875;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.output_every = 20;
  cfg.dissipation = DissipationMode::PerStep;
  const TimeSeries ts = run(make_initial_field(d, g).field, cfg);
  CHECK(ts.status == RunStatus::Clean);
  for (std::size_t i = 1; i < ts.samples.size(); ++i) {
    CHECK(ts.samples[i].l2 <= ts.samples[i - 1].l2);
    CHECK(ts.samples[i].diss_cum >= ts.samples[i - 1].diss_cum);
    CHECK(ts.samples[i].t > ts.samples[i - 1].t);
  }
  CHECK(energy_residual(ts) < 1e-6);

  cfg.dissipation = DissipationMode::PerSnapshot;
  CHECK(energy_residual(run(make_initial_field(d, g).field, cfg)) < 1e-4);
}

TEST_CASE("IMEX-CNAB2 agrees with the exponential integrator") {
  StripGeometry g(kPi, 15.0, 128, 8);
  const Field u0 = make_initial_field(gaussian(1.0, 1.5), g).field;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  const Field a = evolve(u0, cfg);
  cfg.scheme = Scheme::ImexCnab2;
  cfg.dt = 2.5e-4;
  const Field b = evolve(u0, cfg);
  CHECK(l2_diff(a, b) < 1e-4 * std::sqrt(weighted_inner(0.0, u0, u0)));
}

TEST_CASE("stepper reset restarts the multistep history") {
  StripGeometry g(kPi, 15.0, 64, 4);
  const Field u0 = make_initial_field(gaussian(1.0, 1.5), g).field;
  SolverConfig cfg;
  cfg.scheme = Scheme::ImexCnab2;
  cfg.dt = 1e-3;
  SpectralTransform tr(g);
  Stepper s(g, cfg);
  SpectralField a = tr.forward(u0);
  s.step(a, 0.0);
  s.step(a, cfg.dt);
  s.reset();
  SpectralField b = tr.forward(u0), c = tr.forward(u0);
  s.step(b, 0.0);
  Stepper fresh(g, cfg);
  fresh.step(c, 0.0);
  for (std::size_t i = 0; i < b.coeffs().size(); ++i) CHECK(b.coeffs()[i] == c.coeffs()[i]);
}

TEST_CASE("large steps on large data are reported as blow-up") {
  StripGeometry g(kPi, 20.0, 128, 8);
  SolverConfig cfg;
  cfg.dt = 1.0;
  cfg.t_end = 10.0;
  const Field u0 = make_initial_field(gaussian(5.0, 2.0), g).field;
  try {
    run(u0, cfg);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    REQUIRE(e.partial);
    CHECK(e.partial->status == RunStatus::BlowUp);
    CHECK(e.partial->samples.size() >= 1);
    CHECK(e.time() >= 0.0);
  }
}

TEST_CASE("exponential RK4 converges at fourth order in time") {
  StripGeometry g(kPi, 15.0, 128, 8);
  const Field u0 = make_initial_field(gaussian(1.5, 1.5), g).field;
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt = 0.05 / 8.0;
  const Field ref = evolve(u0, cfg);
  cfg.dt = 0.05;
  const double e1 = l2_diff(evolve(u0, cfg), ref);
  cfg.dt = 0.025;
  const double e2 = l2_diff(evolve(u0, cfg), ref);
  MESSAGE("errors " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("damping layer energy is accounted for") {
  StripGeometry g(kPi, 20.0, 128, 4);
  Field u0(g);
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = g.x(ix) + 18.0;
      u0(ix, iy) = 0.1 * std::exp(-x * x) * evaluate_mode(1, g.y(iy), g.width());
    }
  }
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.nonlinear = false;
  cfg.tail_guard = false;
  cfg.dissipation = DissipationMode::PerStep;
  cfg.absorber = 5.0;
  const TimeSeries ts = run(u0, cfg);
  const auto& last = ts.samples.back();
  const double l20 = ts.samples.front().l2;
  CHECK(ts.absorbed > 0.1 * l20);
  CHECK(std::fabs(last.l2 + last.diss_cum + ts.absorbed - l20) < 1e-2 * ts.absorbed);

  // Away from the layer the run is unchanged to round-off.
  const Field centred = make_initial_field(gaussian(0.1, 1.0), g).field;
  cfg.t_end = 0.05;
  const Field a = evolve(centred, cfg);
  cfg.absorber = 0.0;
  const Field b = evolve(centred, cfg);
  CHECK(max_abs_diff(a, b) < 1e-12);
}
