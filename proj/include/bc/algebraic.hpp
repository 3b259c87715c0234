// Integer polynomials, real algebraic numbers with cached enclosures, Mahler
// measure, unit-circle root counts and the {-1,0,1}-polynomial root search.
#pragma once

#include "bc/numeric.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace bc {

class IntPolynomial {
 public:
  IntPolynomial() = default;
  /// Constant term first; trailing zeros are trimmed.
  explicit IntPolynomial(std::vector<Integer> coeffs);
  static IntPolynomial monomial(const Integer& c, int k);

  /// −1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Integer>& coeffs() const { return c_; }
  /// Coefficient of x^k (0 beyond the degree).
  Integer coeff(int k) const;
  const Integer& leading() const;

  Integer content() const;
  /// Divided by its content, leading coefficient made positive.
  IntPolynomial primitive() const;
  IntPolynomial derivative() const;
  /// x^deg · P(1/x).
  IntPolynomial reciprocal() const;

  Rational eval(const Rational& x) const;
  int sign_at(const Rational& x) const { return sgn(eval(x)); }

  Integer l1_norm() const;
  Integer l2_norm_squared() const;
  Integer linf_norm() const;

  /// Symbolic form such as "x^2 - x - 1".
  std::string to_string() const;
  /// Coefficient-list form "[c0,c1,...]".
  std::string to_list_string() const;

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);

 private:
  std::vector<Integer> c_;
};

/// Accepts "[c0,...,cd]" or a symbolic sum like "3x^2-3x+3"; returns the
/// primitive part with positive leading coefficient.
IntPolynomial parse_polynomial(const std::string& text);
/// Same syntax, coefficients kept as written; constants allowed, zero rejected.
IntPolynomial parse_polynomial_verbatim(const std::string& text);

/// Primitive gcd with positive leading coefficient (gcd(0,0) = 0).
IntPolynomial poly_gcd(const IntPolynomial& a, const IntPolynomial& b);
/// a / b when b divides a exactly in Z[x]; throws otherwise.
IntPolynomial poly_exact_div(const IntPolynomial& a, const IntPolynomial& b);
/// Remainder of a modulo b over Q, returned as rational coefficients.
std::vector<Rational> poly_rem_rational(const std::vector<Rational>& a, const IntPolynomial& b);
IntPolynomial squarefree_part(const IntPolynomial& p);
/// Yun decomposition: p = ±content·∏ s_i^{m_i} with s_i primitive, square-free, coprime.
std::vector<std::pair<IntPolynomial, int>> squarefree_factorization(const IntPolynomial& p);

/// Number of distinct real roots of a square-free polynomial in the half-open (a, b].
int sturm_count(const IntPolynomial& squarefree, const Rational& a, const Rational& b);

struct RationalInterval {
  Rational lo;
  Rational hi;
  Rational width() const { return hi - lo; }
};

class AlgebraicNumber;
using AlgebraicPtr = std::shared_ptr<const AlgebraicNumber>;

/// A real algebraic number given by a square-free integer polynomial and an
/// isolating interval. Refinements are cached; the cache is safe for
/// concurrent readers with serialized writers.
class AlgebraicNumber {
 public:
  /// Throws unless [lo, hi] contains exactly one root of poly.
  AlgebraicNumber(const IntPolynomial& poly, const Rational& lo, const Rational& hi);
  static AlgebraicPtr make(const IntPolynomial& poly, const Rational& lo, const Rational& hi);
  static AlgebraicPtr from_rational(const Rational& q);

  const IntPolynomial& minpoly() const { return poly_; }
  int degree() const { return poly_.degree(); }
  RationalInterval isolating_interval() const { return {lo_, hi_}; }
  std::optional<Rational> exact_value() const { return exact_; }

  /// Interval of width ≤ 2^-bits containing the root.
  RationalInterval refine(int bits) const;
  Interval enclosure(mpfr_prec_t prec) const;

  /// Total bisection steps performed so far (cache observability).
  std::size_t refinement_work() const { return work_.load(); }
  std::size_t cached_entries() const;

  /// sign(value − q), exact.
  int compare(const Rational& q) const;
  /// Same minimal polynomial and the same root.
  bool same_number(const AlgebraicNumber& other) const;

  /// λ^n reduced modulo the minimal polynomial: length-degree() coefficient vector.
  std::vector<Rational> power_coeffs(int n) const;
  /// Reduces a coefficient vector of any length modulo the minimal polynomial.
  std::vector<Rational> reduce(const std::vector<Rational>& coeffs) const;
  /// Enclosure of Σ c_j λ^j.
  Interval evaluate(const std::vector<Rational>& coeffs, mpfr_prec_t prec) const;
  /// sign(Σ c_j λ^j) by escalating precision; relies on irreducibility.
  int sign_of(const std::vector<Rational>& coeffs) const;

 private:
  IntPolynomial poly_;
  Rational lo_, hi_;
  std::optional<Rational> exact_;
  mutable std::shared_mutex mu_;
  mutable std::map<int, RationalInterval> cache_;
  mutable std::atomic<std::size_t> work_{0};
  mutable std::vector<std::vector<Rational>> powers_;
};

/// One AlgebraicNumber per distinct real root of P in the closed range [lo, hi].
std::vector<AlgebraicPtr> isolate_real_roots(const IntPolynomial& p, const Rational& lo,
                                             const Rational& hi);

struct MahlerEnclosure {
  Rational lo;
  Rational hi;
  int precision_bits = 0;
};

class MahlerUnknown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enclosure of |a|·∏_{|z|>1}|z| with hi/lo ≤ 1 + 2^{1−bits}.
MahlerEnclosure mahler_measure(const IntPolynomial& p, int bits = 128);

/// Roots with |z| = 1, counted with multiplicity.
int unit_circle_root_count(const IntPolynomial& p);

struct RootCensus {
  int inside = 0;
  int on = 0;
  int outside = 0;
};
/// Certified classification of all complex roots (with multiplicity) by modulus.
RootCensus root_census(const IntPolynomial& p);

enum class Pm1Status { Found, NotFound, BoundExceeded };

struct Pm1Result {
  Pm1Status status = Pm1Status::NotFound;
  std::optional<IntPolynomial> witness;
  int degree_bound = 0;
  std::size_t left_entries = 0;
};

struct Pm1Config {
  int max_degree_bound = 40;
  /// Largest half-enumeration table (entries) before giving up.
  std::size_t memory_budget_entries = 1594323;  // 3^13
};

/// Searches for a nonzero polynomial with coefficients in {−1,0,1} and degree
/// < degree_bound vanishing at x. NotFound is a proof up to the bound only.
Pm1Result pm1_root_search(const AlgebraicNumber& x, int degree_bound, const Pm1Config& cfg = {});

std::string to_string(Pm1Status s);

}  // namespace bc
