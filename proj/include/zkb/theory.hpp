#pragma once

// Closed-form constants of the decay theorems and numerical verifiers for the
// functional inequalities used in their proofs.

#include <cstdint>
#include <string_view>

#include "zkb/field.hpp"

namespace zkb {

struct TheoremConstants {
  double B = 0.0;
  double b_star = 0.0;          // largest admissible weight rate
  double chi = 0.0;             // guaranteed decay rate of (e^{2bx}, u^2)
  double gamma = 0.5;           // optimizer of gamma (1 - gamma)
  double reg_threshold = 0.0;   // 3 pi / (8 B), regular solutions
  double weak_threshold = 0.0;  // 3 pi / (16 B), weak solutions
};

/// b* = (1/5)[-1 + sqrt(1 + 5 pi^2 / (4 B^2))], chi = b* pi^2 / (4 B^2).
TheoremConstants constants_for_width(double B);

/// chi in the form (1/20)[-1 + sqrt(1 + 5 pi^2 / (4 B^2))] pi^2 / B^2.
double chi_closed_form(double B);

struct GammaTradeoff {
  double b = 0.0;
  double u0_bound = 0.0;
  double chi = 0.0;
};

/// Positive root of 4b + 10b^2 = gamma pi^2 / B^2, the matched bound
/// ||u0|| <= 3 pi (1 - gamma) / (4 B), and chi = b gamma (1 - gamma) pi^2 / B^2.
GammaTradeoff gamma_tradeoff(double gamma, double B);

enum class Regime { Regular, Weak };
std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);

struct SmallnessCheck {
  bool holds = false;
  double threshold = 0.0;
  double margin = 0.0;  // threshold - ||u0||
};

SmallnessCheck check_smallness(double u0_norm, double B, Regime regime);

/// Result of checking lhs <= rhs with multiplicative slack 1e-10.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  /// (rhs - lhs) / rhs, or 0 when both sides vanish.
  double margin = 0.0;
};

inline constexpr double kInequalitySlack = 1e-10;

/// (e^{2bx}, u^2) <= (B^2/pi^2) (e^{2bx}, u_y^2).
InequalityCheck verify_steklov(const Field& u, double b);

/// ||u||_{L^4}^2 <= 2 ||u|| ||grad u|| for the zero extension of u.
InequalityCheck verify_gn(const Field& u);

/// (max |e^{bx} u|)^2 <= delta (1 + 2b^2)(e^{2bx}, u_y^2) + 2 delta (e^{2bx}, u_xy^2)
///   + (2 delta1 / delta)(e^{2bx}, u_x^2) + (1/delta)(1/delta1 + 2 delta1 b^2)(e^{2bx}, u^2).
InequalityCheck verify_sup_lemma(const Field& u, double b, double delta, double delta1);

/// Member `index` of the seeded corpus: a sum over the first few sine modes of
/// Gaussian-windowed trigonometric profiles with normally distributed
/// coefficients, truncated to the 2/3 band and scaled to unit L^2 norm.
Field random_field(const StripGeometry& geom, std::uint64_t seed, std::uint64_t index);

}  // namespace zkb
