// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "zkb/diagnostics.hpp"
#include "zkb/harness.hpp"
#include "zkb/solver.hpp"
#include "zkb/theory.hpp"

using namespace zkb;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

harness::RunConfig paper_ref() { return harness::parse_config(harness::preset_document("paper-ref")); }

Field separable(const StripGeometry& g, const std::function<double(double)>& phi, int j) {
  Field f(g);
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const double w = evaluate_mode(j, g.y(iy), g.width());
    for (std::size_t ix = 0; ix < g.nx(); ++ix) f(ix, iy) = phi(g.x(ix)) * w;
  }
  return f;
}

Field evolve(const Field& u0, const SolverConfig& cfg) {
  SpectralTransform tr(u0.geometry());
  Stepper stepper(u0.geometry(), cfg);
  SpectralField v = tr.forward(u0);
  for (std::size_t n = 0; n < cfg.steps(); ++n) stepper.step(v, static_cast<double>(n) * cfg.dt);
  return tr.inverse(v);
}

double l2_diff(const Field& a, const Field& b) {
  const StripGeometry& g = a.geometry();
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    s += d * d;
  }
  return std::sqrt(s * g.dx() * g.dy());
}

Outcome constants() {
  const TheoremConstants c = constants_for_width(kPi);
  const double err = std::max({std::fabs(c.b_star - 0.1), std::fabs(c.chi - 0.025), std::fabs(c.reg_threshold - 0.375),
                               std::fabs(c.weak_threshold - 0.1875)});
  return {err <= 1e-14, "b*=" + num(c.b_star) + " chi=" + num(c.chi) + " reg=" + num(c.reg_threshold) +
                            " weak=" + num(c.weak_threshold) + " max error " + num(err)};
}

struct ReferenceRun {
  std::optional<TimeSeries> series;
  std::string error;
  double chi = 0.0;
};

ReferenceRun reference_run() {
  ReferenceRun r;
  harness::RunConfig cfg = paper_ref();
  cfg.solver.dissipation = DissipationMode::PerStep;
  r.chi = constants_for_width(cfg.geometry.width()).chi;
  try {
    r.series = run(make_initial_field(cfg.initial, cfg.geometry).field, cfg.solver);
  } catch (const BlowUpError& e) {
    r.error = std::string("blow-up: ") + e.what();
  }
  return r;
}

Outcome energy_identity(const ReferenceRun& ref) {
  if (!ref.series) return {false, ref.error};
  const TimeSeries& ts = *ref.series;
  const double residual = energy_residual(ts);
  const double absorbed = ts.absorbed / ts.samples.front().l2;
  return {residual < 1e-6 && ts.status == RunStatus::Clean,
          "max residual " + num(residual) + " (layer absorbed " + num(absorbed) + " of ||u0||^2), status " +
              std::string(to_string(ts.status))};
}

Outcome linear_exactness() {
  StripGeometry g(kPi, kPi, 32, 4);
  InitialData d;
  d.kind = InitialKind::SingleMode;
  d.wavenumber = 1.0;
  d.mode = 1;
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.nonlinear = false;
  cfg.store_snapshots = true;
  const Field u0 = make_initial_field(d, g).field;
  const TimeSeries ts = run(u0, cfg);
  const double ratio = ts.samples.back().l2 / ts.samples.front().l2;
  SpectralTransform tr(g);
  const cplx before = tr.forward(u0)(0, 1);
  const cplx after = tr.forward(ts.snapshots.back())(0, 1);
  const double phase = std::arg(after / before);
  const double ratio_err = std::fabs(ratio - std::exp(-2.0));
  const double phase_err = std::fabs(phase - 2.0 * cfg.t_end);
  return {ratio_err < 1e-10 && phase_err < 1e-10,
          "ratio " + num(ratio) + " (error " + num(ratio_err) + "), phase " + num(phase) + " (error " + num(phase_err) + ")"};
}

Outcome weighted_decay(const ReferenceRun& ref) {
  if (!ref.series) return {false, ref.error};
  const TimeSeries& ts = *ref.series;
  const double w0 = ts.samples.front().w_l2;
  double worst = -INFINITY;
  std::size_t clean = 0;
  for (const NormSample& s : ts.samples) {
    if (ts.contaminated_at && s.t >= *ts.contaminated_at) break;
    const double bound = std::exp(-ref.chi * s.t) * w0 * (1.0 + 1e-6);
    worst = std::max(worst, s.w_l2 / bound);
    ++clean;
  }
  const DecayFit fit = fit_decay_rate(ts, NormId::WeightedL2);
  const bool pass = worst <= 1.0 && fit.rate >= 0.95 * ref.chi && ts.status == RunStatus::Clean;
  return {pass, "max w_l2/bound " + num(worst) + " over " + std::to_string(clean) + " samples, fitted rate " +
                    num(fit.rate) + " on [" + num(fit.t0) + ", " + num(fit.t1) + "] vs chi " + num(ref.chi)};
}

Outcome weighted_h1_decay(const ReferenceRun& ref) {
  if (!ref.series) return {false, ref.error};
  const DecayFit fit = fit_decay_rate(*ref.series, NormId::WeightedH1);
  return {fit.rate >= 0.95 * ref.chi && ref.series->status == RunStatus::Clean,
          "fitted rate " + num(fit.rate) + " on [" + num(fit.t0) + ", " + num(fit.t1) + "] vs chi " + num(ref.chi)};
}

Outcome steklov() {
  const StripGeometry g = harness::verify_geometry();
  const double b = g.weight_rate();
  const auto phi = [](double x) { return std::exp(-x * x / 4.0); };
  const InequalityCheck eq = verify_steklov(separable(g, phi, 1), b);
  const double eq_err = std::fabs(eq.lhs - eq.rhs) / eq.rhs;
  double mode_err = 0.0;
  for (int j = 1; j <= 8; ++j) {
    const InequalityCheck c = verify_steklov(separable(g, phi, j), b);
    mode_err = std::max(mode_err, std::fabs(c.lhs / c.rhs - 1.0 / (j * j)));
  }
  const harness::SuiteReport r = harness::run_inequality_suite("steklov", 100, 7, g);
  return {eq_err < 1e-10 && mode_err < 1e-10 && r.failures == 0,
          "equality error " + num(eq_err) + ", mode ratio error " + num(mode_err) + ", " +
              std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases) + " hold, worst margin " +
              num(r.worst_margin)};
}

Outcome gn_and_sup() {
  const StripGeometry g = harness::verify_geometry();
  const harness::SuiteReport gn = harness::run_inequality_suite("gn", 100, 11, g);
  const harness::SuiteReport sup = harness::run_inequality_suite("sup", 100, 13, g);
  return {gn.failures == 0 && sup.failures == 0 && gn.cases == 100 && sup.cases > 0,
          "gn " + std::to_string(gn.cases - gn.failures) + "/" + std::to_string(gn.cases) + " worst margin " +
              num(gn.worst_margin) + "; sup " + std::to_string(sup.cases - sup.failures) + "/" +
              std::to_string(sup.cases) + " worst margin " + num(sup.worst_margin)};
}

Outcome coupling_oracle() {
  StripGeometry g(kPi, kPi, 64, 8);
  const Field u = separable(g, [](double x) { return std::sin(x); }, 1);
  SpectralTransform tr(g);
  const SpectralField s = tr.forward(nonlinear_term(u));
  // u u_x = (1/2) sin(2x) w_1^2; sin(2x) has coefficient 1/(2i) at n = 2 with the origin at x = -pi.
  double worst = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    for (std::size_t n = 0; n < g.nk(); ++n) {
      const cplx expect = n == 2 ? cplx{0.0, -0.25 * coupling_coefficient(1, 1, static_cast<int>(j) + 1, kPi)} : cplx{};
      worst = std::max(worst, std::abs(s(j, n) - expect));
    }
  }
  return {worst < 1e-8, "max coefficient error " + num(worst)};
}

Outcome self_convergence() {
  StripGeometry g(kPi, 15.0, 128, 8);
  InitialData d;
  d.amplitude = 1.5;
  d.width = 1.5;
  const Field u0 = make_initial_field(d, g).field;
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt = 0.05 / 8.0;
  const Field ref = evolve(u0, cfg);
  cfg.dt = 0.05;
  const double e1 = l2_diff(evolve(u0, cfg), ref);
  cfg.dt = 0.025;
  const double e2 = l2_diff(evolve(u0, cfg), ref);
  const double order_ratio = e1 / e2;

  harness::RunConfig base = paper_ref();
  base.solver.t_end = 2.0;
  const TimeSeries coarse = run(make_initial_field(base.initial, base.geometry).field, base.solver);
  const StripGeometry fine_geom(base.geometry.width(), base.geometry.half_length(), 2 * base.geometry.nx(),
                                2 * base.geometry.ny(), base.geometry.weight_rate());
  const TimeSeries fine = run(make_initial_field(base.initial, fine_geom).field, base.solver);
  const double change = std::fabs(coarse.samples.back().w_l2 - fine.samples.back().w_l2);
  return {order_ratio >= 8.0 && change < 1e-6,
          "dt halving error ratio " + num(order_ratio) + " (" + num(e1) + " -> " + num(e2) +
              "), grid doubling changes terminal w_l2 by " + num(change) + " (relative " +
              num(change / coarse.samples.back().w_l2) + ")"};
}

Outcome dependence() {
  try {
    const harness::DependenceReport r = harness::continuous_dependence(paper_ref(), 1e-3);
    return {r.passes, "terminal growth " + num(r.growth_full) + " (eps) vs " + num(r.growth_half) +
                          " (eps/2), ratio " + num(r.ratio) + "; peak " + num(r.peak_full) + " vs " + num(r.peak_half)};
  } catch (const BlowUpError& e) {
    return {false, std::string("blow-up: ") + e.what()};
  }
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "constants", constants);
  report(3, "linear exactness", linear_exactness);
  report(6, "steklov suite", steklov);
  report(7, "gagliardo-nirenberg and sup", gn_and_sup);
  report(8, "coupling oracle", coupling_oracle);

  std::printf("running the paper-ref reference simulation...\n");
  std::fflush(stdout);
  const auto start = std::chrono::steady_clock::now();
  const ReferenceRun ref = reference_run();
  std::printf("reference run finished in %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  report(2, "energy identity", [&] { return energy_identity(ref); });
  report(4, "weighted L2 decay", [&] { return weighted_decay(ref); });
  report(5, "weighted H1 decay", [&] { return weighted_h1_decay(ref); });

  report(9, "self-convergence", self_convergence);
  report(10, "continuous dependence", dependence);

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
