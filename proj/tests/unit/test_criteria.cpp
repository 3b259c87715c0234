#include "bc/criteria.hpp"

#include "doctest.h"

#include <cmath>

using namespace bc;

namespace {
Integer I(const char* s) { return parse_integer(s); }
CriterionConfig at(int bits) {
  CriterionConfig c;
  c.bits = bits;
  c.max_bits = bits;
  return c;
}
}  // namespace

TEST_CASE("rational condition") {
  auto pass = rational_condition(1, I("1e50"), Rational(1, 2), at(256));
  CHECK(pass.verdict == Verdict::Pass);
  auto fail = rational_condition(1, I("1e10"), Rational(1, 2), at(256));
  CHECK(fail.verdict == Verdict::Fail);
  CHECK(rational_condition(1, 10, Rational(1, 2)).verdict == Verdict::Fail);
  auto out = rational_condition(1, I("1e50"), Rational(1, 10), at(256));
  CHECK(out.verdict == Verdict::Unknown);
  CHECK(out.inequality_holds.value());
  CHECK_THROWS_AS(rational_condition(2, 4, Rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(rational_condition(5, 4, Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("rational boundary by bisection") {
  Integer b = rational_boundary(1);
  CHECK(b >= I("1e40"));
  CHECK(b <= I("1e42"));
  CHECK(rational_condition(1, b, Rational(1, 2)).verdict == Verdict::Pass);
  CHECK(rational_condition(1, b - 1, Rational(1, 2)).verdict == Verdict::Fail);
}

TEST_CASE("explicit condition agrees with the rational form") {
  auto lam = AlgebraicNumber::from_rational(1 - Rational(1, I("1e50")));
  auto r = explicit_condition(lam, Rational(1, 2));
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.pm1_status == "NOT_A_UNIT");
  CHECK(explicit_condition(AlgebraicNumber::from_rational(Rational(1, 2)), Rational(1, 2)).verdict == Verdict::Fail);
  CHECK(explicit_condition(AlgebraicNumber::from_rational(1 - Rational(1, I("1e30"))), Rational(1, 2)).verdict == Verdict::Fail);
  // Golden mean: a unit that is a root of x² + x − 1, a {−1,0,1} polynomial.
  auto g = explicit_condition(AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1), Rational(1, 2));
  CHECK(g.verdict == Verdict::Fail);
  CHECK(g.pm1_status == "FOUND");
  // Monotonicity in 1 − λ for a fixed Mahler measure.
  for (const char* bs : {"1e45", "1e47", "1e49", "1e60"}) {
    auto rr = rational_condition(1, I(bs), Rational(1, 2));
    auto ee = explicit_condition(AlgebraicNumber::from_rational(1 - Rational(1, I(bs))), Rational(1, 2));
    CHECK(rr.verdict == ee.verdict);
  }
}

TEST_CASE("nth root condition") {
  CHECK(nth_root_condition(2, I("1e40"), Rational(1, 2)).verdict == Verdict::Pass);
  CHECK(nth_root_condition(2, 10, Rational(1, 2)).verdict == Verdict::Fail);
  Integer k = nth_root_threshold(I("1000000"));
  CHECK(nth_root_condition(I("1000000"), k, Rational(1, 2)).verdict == Verdict::Pass);
  CHECK(nth_root_condition(I("1000000"), k - 1, Rational(1, 2)).verdict == Verdict::Fail);
  // 10^37 · ln 2 · log 3 · (log log 4)^3 ≈ 1.0986·10^37
  Integer k2 = nth_root_threshold(2);
  CHECK(to_ld(k2) == doctest::Approx(1.0986122886681098e37).epsilon(1e-12));
}

TEST_CASE("Mahler bound chain") {
  auto a = mahler_upper_bounds(parse_polynomial("x-2"));
  CHECK(a.chain_ok());
  CHECK(to_ld(a.l2.lo) == doctest::Approx(std::sqrt(5.0)));
  auto b = mahler_upper_bounds(parse_polynomial("x^2-x-1"));
  CHECK(b.chain_ok());
  CHECK(to_ld(b.mahler.lo) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    int d = static_cast<int>(rng.uniform_int(1, 12));
    std::vector<Integer> c;
    for (int i = 0; i <= d; ++i) c.emplace_back(static_cast<long>(rng.uniform_int(-20, 20)));
    if (c.back() == 0) c.back() = 1;
    CHECK(mahler_upper_bounds(IntPolynomial(c)).chain_ok());
  }
}

TEST_CASE("Dobrowolski bound") {
  auto v = dobrowolski_lower(16);
  CHECK(v.contains(1 + Rational(1, 9600)));
  CHECK(v.width_ld() < 1e-18);
  CHECK(dobrowolski_lower(3).certainly_positive());
  CHECK(dobrowolski_lower(3).lo_ld() > 1);
  CHECK(dobrowolski_lower(I("1000000")).lo_ld() > 1);
  CHECK_THROWS_AS(dobrowolski_lower(2), std::invalid_argument);
}

TEST_CASE("sparse family") {
  auto Q = IntPolynomial({Integer(-4), Integer(2)});
  auto small = sparse_poly_family(Q, 10, Rational(1, 2));
  CHECK(small.report.verdict == Verdict::Fail);
  CHECK(small.eisenstein.even_coefficients);
  CHECK_FALSE(small.eisenstein.a0_not_div4);  // a0 = −4
  CHECK(eisenstein_at_2(IntPolynomial({Integer(-6), Integer(2)})).ok());
  REQUIRE(small.root_enclosure);
  CHECK(small.root_enclosure->lo > 1);
  auto big = sparse_poly_family(Q, I("1e40"), Rational(1, 2));
  CHECK(big.report.verdict == Verdict::Pass);
  REQUIRE(big.root_enclosure);
  CHECK(big.root_enclosure->lo > 1);
  // x0 − 1 ≈ ln 2 / n for x^n + 2x − 4.
  CHECK(to_ld(big.root_enclosure->lo - 1) == doctest::Approx(std::log(2.0) * 1e-40).epsilon(1e-3));
  Integer n = sparse_threshold(Q);
  CHECK(sparse_poly_family(Q, n, Rational(1, 2)).report.verdict == Verdict::Pass);
  CHECK(sparse_poly_family(Q, n - 1, Rational(1, 2)).report.verdict == Verdict::Fail);
  // Closed form: n* = ⌊d + ln l1 / ln(1 + ε)⌋ + 1, ε = 10^{-37}(log 7 · log log 8)^{-3}.
  long double eps = 1e-37L / std::pow(std::log2(7.0L) * std::log2(std::log2(8.0L)), 3);
  CHECK(to_ld(n) == doctest::Approx(1 + std::log(6.0L) / eps).epsilon(1e-9));
  CHECK_THROWS_AS(sparse_poly_family(IntPolynomial({Integer(4), Integer(2)}), 10, Rational(1, 2)), std::invalid_argument);
  auto odd = sparse_poly_family(IntPolynomial({Integer(-3), Integer(1)}), I("1e40"), Rational(1, 2));
  CHECK(odd.report.verdict == Verdict::Unknown);
}

TEST_CASE("general shape is never certified") {
  auto lam = AlgebraicNumber::from_rational(1 - Rational(1, 1000));
  auto r = general_condition(lam, Rational(1, 2), 1, Rational(1, 10));
  CHECK(r.verdict == Verdict::Unknown);
  CHECK(r.inequality_holds.value());
}

TEST_CASE("Gaussian entropy gap") {
  auto h = gaussian_entropy_gap(Rational(1, 2));
  CHECK(h.value > 0);
  CHECK(h.abs_error < 0.1 * h.value);
  auto a = gaussian_entropy_gap(Rational(1, 4)), b = gaussian_entropy_gap(Rational(3, 4));
  CHECK(std::fabs(a.value - b.value) <= a.abs_error + b.abs_error + 1e-12);
  auto tiny = gaussian_entropy_gap(Rational(1, 1000000));
  CHECK(std::fabs(tiny.value) < 1e-4);
  // Coarser tolerance gives the same value to the reported accuracy.
  QuadratureConfig loose;
  loose.tolerance = 1e-8L;
  auto c = gaussian_entropy_gap(Rational(1, 2), loose);
  CHECK(std::fabs(c.value - h.value) <= c.abs_error + h.abs_error + 1e-8);
}
