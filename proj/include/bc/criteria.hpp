// Certified checks of the explicit absolute-continuity condition
//     λ > 1 − 10^{-37} (log(M_λ + 1))^{-1} (log log(M_λ + 2))^{-3}
// and of its specializations to rational λ, n-th roots and sparse polynomials.
// Logarithms are base 2 unless written ln.
#pragma once

#include "bc/algebraic.hpp"
#include "bc/entropy.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bc {

enum class Verdict { Pass, Fail, Unknown };
std::string to_string(Verdict v);

struct CriterionConfig {
  int bits = 128;
  int max_bits = 4096;
  int pm1_degree_bound = 20;
};

struct CriterionReport {
  std::string criterion;
  std::string lambda;  // description
  Rational p;
  std::optional<RationalInterval> mahler;
  std::optional<RationalInterval> threshold;
  std::optional<RationalInterval> one_minus_lambda;
  Verdict verdict = Verdict::Unknown;
  /// Whether the inequality itself was decided (independent of applicability).
  std::optional<bool> inequality_holds;
  std::string pm1_status;
  std::vector<std::string> notes;
  int precision_bits = 0;

  nlohmann::json to_json() const;
};

/// Explicit condition for an algebraic λ ∈ (0, 1). Applicability: 1/4 ≤ p ≤ 3/4
/// and λ not a root of a {−1,0,1} polynomial (certified for non-units, searched
/// up to a degree bound otherwise).
CriterionReport explicit_condition(const AlgebraicPtr& lambda, const Rational& p, const CriterionConfig& cfg = {});

/// λ = 1 − a/b: a < 10^{-37} b / (log(b+1) (log log(b+2))^3).
CriterionReport rational_condition(const Integer& a, const Integer& b, const Rational& p, const CriterionConfig& cfg = {});
/// Smallest b with rational_condition(a, b) certified, by bisection.
Integer rational_boundary(const Integer& a, const CriterionConfig& cfg = {});

/// λ = n^{-1/k}: k > 10^{37} ln(n) log(n+1) (log log(n+2))^3.
CriterionReport nth_root_condition(const Integer& n, const Integer& k, const Rational& p, const CriterionConfig& cfg = {});
/// Smallest k satisfying the nth-root inequality for this n.
Integer nth_root_threshold(const Integer& n, const CriterionConfig& cfg = {});

struct MahlerBoundsReport {
  MahlerEnclosure mahler;
  Integer l1;
  Integer l2_squared;
  Integer linf;
  int degree = 0;
  RationalInterval l2;             // enclosure of √l2²
  RationalInterval sqrt_d1_linf;   // enclosure of √(d+1)·l∞
  bool mahler_le_l2 = false;       // no certified violation of M ≤ l2
  bool l2_le_min = false;          // exact: l2² ≤ min(l1², (d+1) l∞²)
  bool chain_ok() const { return mahler_le_l2 && l2_le_min; }
  nlohmann::json to_json() const;
};
MahlerBoundsReport mahler_upper_bounds(const IntPolynomial& P, int bits = 128);

/// Enclosure of 1 + (1/1200)(log log n / log n)^3, n ≥ 3.
Interval dobrowolski_lower(const Integer& n, mpfr_prec_t bits = 64);

struct EisensteinCheck {
  bool even_coefficients = false;  // 2 | a_j for all j
  bool a0_not_div4 = false;        // 4 ∤ a_0
  bool ok() const { return even_coefficients && a0_not_div4; }
};
EisensteinCheck eisenstein_at_2(const IntPolynomial& Q);

/// x^n + Q(x) with Q(1) < 0, n > deg Q: l1(Q)^{1/(n−d)} < 1 + 10^{-37}(log(l1+1) log log(l1+2))^{-3}.
/// The report also carries an enclosure of the root x0 ∈ (1, l1^{1/(n−d)}] (in `notes`
/// and root_enclosure) and of 1 − 1/x0.
struct SparseReport {
  CriterionReport report;
  EisensteinCheck eisenstein;
  std::optional<RationalInterval> root_enclosure;
};
SparseReport sparse_poly_family(const IntPolynomial& Q, const Integer& n, const Rational& p, const CriterionConfig& cfg = {});
/// Smallest n for which the sparse inequality is certified, by bisection.
Integer sparse_threshold(const IntPolynomial& Q, const CriterionConfig& cfg = {});

/// Exploratory shape λ > 1 − c·min(log M, (log M)^{−1−ε}) with a user-supplied c.
CriterionReport general_condition(const AlgebraicPtr& lambda, const Rational& p, const Rational& c, const Rational& eps,
                                  const CriterionConfig& cfg = {});

struct QuadratureConfig {
  long double tolerance = 1e-13L;
  unsigned max_depth = 15;
};
/// ∫ g_1 log g_1 − ∫ g_√2 log g_√2 with g_j(x) = p g(x+j) + (1−p) g(x−j), g the
/// standard Gaussian density. abs_error combines the quadrature estimate, the
/// discrepancy between two rules and the analytic tail bound outside [−12−√2, 12+√2].
EntropyValue gaussian_entropy_gap(const Rational& p, const QuadratureConfig& cfg = {});

}  // namespace bc
