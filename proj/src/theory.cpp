#include "zkb/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ygrid.hpp"
#include "zkb/diagnostics.hpp"
#include "zkb/errors.hpp"

namespace zkb {

namespace {

constexpr double kPi = std::numbers::pi;

void require_width(double B) {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("strip width B must be positive");
}

// Positive root of 4b + 10b^2 = gamma (pi/B)^2, written without cancellation.
double weight_rate_for(double gamma, double B) {
  const double r = kPi / B;
  const double q = gamma * r * r;
  return q / (2.0 + std::sqrt(4.0 + 10.0 * q));
}

InequalityCheck compare(double lhs, double rhs) {
  InequalityCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.holds = lhs <= rhs * (1.0 + kInequalitySlack);
  c.margin = rhs > 0.0 ? (rhs - lhs) / rhs : 0.0;
  return c;
}

}  // namespace

TheoremConstants constants_for_width(double B) {
  require_width(B);
  const double r = kPi / B;
  TheoremConstants c;
  c.B = B;
  c.gamma = 0.5;
  c.b_star = weight_rate_for(0.5, B);
  c.chi = c.b_star * 0.25 * r * r;
  c.reg_threshold = 3.0 * r / 8.0;
  c.weak_threshold = 3.0 * r / 16.0;
  return c;
}

double chi_closed_form(double B) {
  require_width(B);
  const double r = kPi / B;
  return (-1.0 + std::sqrt(1.0 + 1.25 * r * r)) * r * r / 20.0;
}

GammaTradeoff gamma_tradeoff(double gamma, double B) {
  require_width(B);
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  const double r = kPi / B;
  GammaTradeoff t;
  t.b = weight_rate_for(gamma, B);
  t.u0_bound = 3.0 * r * (1.0 - gamma) / 4.0;
  t.chi = t.b * (gamma * (1.0 - gamma)) * r * r;
  return t;
}

std::string_view to_string(Regime r) { return r == Regime::Regular ? "regular" : "weak"; }

Regime parse_regime(std::string_view name) {
  if (name == "regular") return Regime::Regular;
  if (name == "weak") return Regime::Weak;
  throw ConfigError("unknown regime: " + std::string(name));
}

SmallnessCheck check_smallness(double u0_norm, double B, Regime regime) {
  if (!(u0_norm >= 0.0)) throw DomainError("||u0|| must be >= 0");
  const TheoremConstants c = constants_for_width(B);
  SmallnessCheck s;
  s.threshold = regime == Regime::Regular ? c.reg_threshold : c.weak_threshold;
  s.margin = s.threshold - u0_norm;
  s.holds = u0_norm <= s.threshold;
  return s;
}

InequalityCheck verify_steklov(const Field& u, double b) {
  const WeightedNorms w = weighted_norms(u, b);
  const double B = u.geometry().width();
  return compare(w.u, (B * B / (kPi * kPi)) * w.uy);
}

InequalityCheck verify_gn(const Field& u) {
  const StripGeometry geom = u.geometry().with_weight_rate(0.0);
  SpectralTransform tr(geom);
  const SpectralField v = tr.forward(Field(geom, std::vector<double>(u.values().begin(), u.values().end())));
  detail::FineSampler fine(geom);
  const std::vector<double> s = fine.sample(v, 0);
  double quartic = 0.0;
  for (double x : s) quartic += (x * x) * (x * x);
  quartic *= fine.dx() * fine.dy();
  NormEvaluator ev(geom);
  const WeightedNorms w = ev.weighted(v);
  const double grad = std::sqrt(w.ux + w.uy);
  return compare(std::sqrt(quartic), 2.0 * std::sqrt(w.u) * grad);
}

InequalityCheck verify_sup_lemma(const Field& u, double b, double delta, double delta1) {
  if (!(delta > 0.0) || !(delta1 > 0.0)) throw DomainError("delta and delta1 must be positive");
  const WeightedNorms w = weighted_norms(u, b);
  const double rhs = delta * (1.0 + 2.0 * b * b) * w.uy + 2.0 * delta * w.uxy + (2.0 * delta1 / delta) * w.ux +
                     (1.0 / delta) * (1.0 / delta1 + 2.0 * delta1 * b * b) * w.u;
  return compare(w.sup * w.sup, rhs);
}

Field random_field(const StripGeometry& geom, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double L = geom.half_length();
  std::uniform_real_distribution<double> center(-0.25 * L, 0.25 * L);
  std::uniform_real_distribution<double> width(0.05 * L, 0.15 * L);
  constexpr int kHarmonics = 4;

  const std::size_t nx = geom.nx(), ny = geom.ny();
  const std::size_t modes = std::min<std::size_t>(ny, 6);
  std::vector<double> vals(geom.size(), 0.0);
  for (std::size_t j = 0; j < modes; ++j) {
    const double x0 = center(rng), s = width(rng);
    double a[kHarmonics + 1], c[kHarmonics + 1];
    for (int p = 0; p <= kHarmonics; ++p) {
      a[p] = normal(rng);
      c[p] = normal(rng);
    }
    const double scale = 1.0 / static_cast<double>(j + 1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = geom.x(i);
      const double r = (x - x0) / s;
      double trig = 0.0;
      for (int p = 0; p <= kHarmonics; ++p) trig += a[p] * std::cos(p * x) + c[p] * std::sin(p * x);
      const double g = scale * std::exp(-r * r) * trig;
      for (std::size_t m = 0; m < ny; ++m) {
        vals[m * nx + i] += g * evaluate_mode(static_cast<int>(j) + 1, geom.y(m), geom.width());
      }
    }
  }
  SpectralTransform tr(geom);
  SpectralField v = tr.forward(Field(geom, std::move(vals)));
  const std::size_t keep = geom.dealiased_nk();
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t n = keep; n < geom.nk(); ++n) v(j, n) = cplx{};
  }
  const double norm = std::sqrt(v.l2_squared());
  if (norm > 0.0) v *= 1.0 / norm;
  return tr.inverse(v);
}

}  // namespace zkb
