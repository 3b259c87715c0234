// Exact integers/rationals, outward-rounded intervals and a portable RNG.
#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bc {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", "-17", "1e50", "10^40", "0.25" or "2.5e-3" into an exact rational.
Rational parse_rational(const std::string& text);
/// Parses an integer literal, also accepting "1e50" and "10^40".
Integer parse_integer(const std::string& text);

/// Always "num/den" (den ≥ 1), the serialization used for every enclosure.
std::string to_fraction_string(const Rational& q);

/// Nearest long double to an arbitrary-size integer (about 64 significant bits).
long double to_ld(const Integer& z);
long double to_ld(const Rational& q);
/// Binary logarithm of a positive rational without overflow for huge operands.
long double log2_ld(const Rational& q);

inline int sign(const Integer& z) { return sgn(z); }
inline int sign(const Rational& q) { return sgn(q); }

Integer pow_int(const Integer& base, unsigned long exp);

/// A configured enumeration or memory bound was exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Rational pow_rat(const Rational& base, long exp);

/// Closed interval [lo, hi] with MPFR endpoints rounded outward.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 128);
  Interval(const Rational& q, mpfr_prec_t prec);
  Interval(const Rational& lo, const Rational& hi, mpfr_prec_t prec);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval from_long(long v, mpfr_prec_t prec);
  /// Degenerate interval at an MPFR value (exact if prec suffices, else widened outward).
  static Interval from_mpfr(const mpfr_t v, mpfr_prec_t prec);

  mpfr_prec_t precision() const { return prec_; }
  const mpfr_t& lo() const { return lo_; }
  const mpfr_t& hi() const { return hi_; }
  mpfr_t& lo() { return lo_; }
  mpfr_t& hi() { return hi_; }

  Rational lo_rational() const;
  Rational hi_rational() const;
  long double lo_ld() const;  // rounded down
  long double hi_ld() const;  // rounded up
  long double mid_ld() const;
  /// Width rounded up.
  long double width_ld() const;

  bool contains_zero() const;
  bool certainly_positive() const;
  bool certainly_negative() const;
  bool contains(const Rational& q) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  Interval operator-() const;

  Interval abs() const;
  Interval sqr() const;
  Interval sqrt() const;
  Interval log2() const;  // requires lo > 0
  Interval ln() const;    // requires lo > 0
  Interval exp() const;
  Interval pow_ui(unsigned long e) const;  // requires lo ≥ 0

  /// Hull of the two intervals.
  static Interval hull(const Interval& a, const Interval& b);

 private:
  mpfr_prec_t prec_;
  mpfr_t lo_;
  mpfr_t hi_;
};

/// a < b for every value in the intervals.
bool certainly_less(const Interval& a, const Interval& b);

/// mt19937_64 with hand-written bounded draws so results are identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next() { return eng_(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1).
  double uniform01();
  /// Gamma(shape, 1) variate via Marsaglia–Tsang (shape > 0).
  double gamma(double shape);

 private:
  std::mt19937_64 eng_;
};

/// SplitMix64 mixing used to derive independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_string(const std::string& s);

/// Neumaier-compensated long double accumulator.
class CompensatedSum {
 public:
  void add(long double x);
  long double value() const { return sum_ + comp_; }
  std::size_t terms() const { return n_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
  std::size_t n_ = 0;
};

/// Worker count used by parallel_for (default 1; 0 means hardware concurrency).
void set_thread_count(unsigned n);
unsigned thread_count();
/// Runs body(i) for i in [0, n) on up to thread_count() threads. Callers write
/// results by index, so output never depends on scheduling. The first
/// exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// x·log2(x) with 0·log 0 = 0.
long double xlog2x(long double x);

}  // namespace bc
