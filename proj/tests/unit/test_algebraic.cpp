#include "bc/algebraic.hpp"

#include "doctest.h"

using namespace bc;

TEST_CASE("parse_polynomial") {
  CHECK(parse_polynomial("x^2 - x - 1").to_list_string() == "[-1,-1,1]");
  CHECK(parse_polynomial("[\xE2\x88\x92" "1,2]").to_list_string() == "[-1,2]");
  CHECK(parse_polynomial("3x^2-3x+3").to_list_string() == "[1,-1,1]");
  CHECK(parse_polynomial("-2*x^3 + 4").to_list_string() == "[-2,0,0,1]");
  CHECK(parse_polynomial("x^2 - x - 1").to_string() == "x^2 - x - 1");
  CHECK_THROWS(parse_polynomial("x^2 +* 1"));
  CHECK_THROWS(parse_polynomial("0"));
  CHECK_THROWS(parse_polynomial("[0,0]"));
  CHECK_THROWS(parse_polynomial("5"));
}

TEST_CASE("gcd and square-free factorization") {
  auto p = parse_polynomial("x^2-1");
  auto q = parse_polynomial("x^2+2x+1");
  CHECK(poly_gcd(p, q).to_list_string() == "[1,1]");
  // (x-1)^2 (x+2)^3
  auto a = parse_polynomial("x-1"), b = parse_polynomial("x+2");
  auto f = a * a * b * b * b;
  auto sq = squarefree_factorization(f);
  REQUIRE(sq.size() == 2);
  CHECK(sq[0].first == a);
  CHECK(sq[0].second == 2);
  CHECK(sq[1].first == b);
  CHECK(sq[1].second == 3);
  CHECK(squarefree_part(f) == a * b);
}

TEST_CASE("isolate_real_roots") {
  auto r = isolate_real_roots(parse_polynomial("2x-1"), 0, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0]->compare(Rational(1, 2)) == 0);
  CHECK(isolate_real_roots(parse_polynomial("x^2-x-1"), 0, 1).empty());
  auto g = isolate_real_roots(parse_polynomial("x^2+x-1"), 0, 1);
  REQUIRE(g.size() == 1);
  auto iv = g[0]->refine(40);
  CHECK(to_ld(iv.lo) == doctest::Approx(0.6180339887498949).epsilon(1e-12));
  // Five roots of (x^2-2)(x^3-x) in [-2, 2], including the rational 0 and ±1.
  auto many = isolate_real_roots(parse_polynomial("x^2-2") * parse_polynomial("x^3-x"), -2, 2);
  CHECK(many.size() == 5);
  for (std::size_t i = 1; i < many.size(); ++i)
    CHECK(many[i - 1]->isolating_interval().hi <= many[i]->isolating_interval().lo);
}

TEST_CASE("refine caching and monotonicity") {
  auto x = AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1);
  auto a = x->refine(64);
  Rational target(Integer(1), pow_int(2, 64));
  CHECK(a.width() <= target);
  CHECK(a.lo < Rational(618033988749894849, 1000000000000000000) + Rational(1, 1000000000000000000));
  std::size_t w = x->refinement_work();
  auto b = x->refine(10);
  CHECK(x->refinement_work() == w);
  CHECK(b.lo == a.lo);
  auto c = x->refine(100);
  CHECK(c.lo >= a.lo);
  CHECK(c.hi <= a.hi);
}

TEST_CASE("rational roots are detected") {
  auto x = AlgebraicNumber::make(parse_polynomial("6x^2-5x+1"), Rational(2, 5), 1);
  REQUIRE(x->exact_value().has_value());
  CHECK(*x->exact_value() == Rational(1, 2));
  CHECK(x->degree() == 1);
}

TEST_CASE("power_coeffs and sign_of") {
  auto x = AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1);
  // λ^2 = 1 − λ
  auto p2 = x->power_coeffs(2);
  CHECK(p2[0] == 1);
  CHECK(p2[1] == -1);
  CHECK(x->sign_of({Rational(-1, 2), Rational(1)}) == 1);   // λ − 1/2 > 0
  CHECK(x->sign_of({Rational(-5, 8), Rational(1)}) == -1);  // λ − 5/8 < 0
}

TEST_CASE("mahler_measure") {
  auto m = mahler_measure(parse_polynomial("x-2"));
  CHECK(m.lo == 2);
  CHECK(m.hi == 2);
  m = mahler_measure(parse_polynomial("2x-1"));
  CHECK(m.lo == 2);
  CHECK(m.hi == 2);
  m = mahler_measure(parse_polynomial("x^2-x-1"));
  CHECK(to_ld(m.lo) == doctest::Approx(1.6180339887498949).epsilon(1e-15));
  CHECK(m.hi - m.lo <= Rational(Integer(1), pow_int(2, 60)));
  // Cyclotomic factors leave M unchanged.
  auto m2 = mahler_measure(parse_polynomial("x^2-x-1") * parse_polynomial("x^2+x+1") * parse_polynomial("x^4+1"));
  CHECK(to_ld(m2.lo) == doctest::Approx(1.6180339887498949).epsilon(1e-15));
  // Lehmer's polynomial.
  auto lehmer = mahler_measure(parse_polynomial("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"));
  CHECK(to_ld(lehmer.lo) == doctest::Approx(1.17628081825991750654).epsilon(1e-15));
  CHECK(mahler_measure(parse_polynomial("x^5-1")).hi == 1);
}

TEST_CASE("mahler bounded by l2 norm on random polynomials") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    int d = static_cast<int>(rng.uniform_int(1, 12));
    std::vector<Integer> c;
    for (int k = 0; k <= d; ++k) c.push_back(Integer(static_cast<long>(rng.uniform_int(-9, 9))));
    if (c.back() == 0) c.back() = 1;
    IntPolynomial p(c);
    if (p.degree() < 1) continue;
    auto m = mahler_measure(p, 64);
    CHECK(m.lo * m.lo <= Rational(p.l2_norm_squared()));
    auto rc = root_census(p);
    CHECK(rc.inside + rc.on + rc.outside == p.degree());
    CHECK(rc.on == unit_circle_root_count(p));
  }
}

TEST_CASE("unit_circle_root_count") {
  CHECK(unit_circle_root_count(parse_polynomial("x^2+x+1")) == 2);
  CHECK(unit_circle_root_count(parse_polynomial("x-2")) == 0);
  CHECK(unit_circle_root_count(parse_polynomial("x^2+x-1")) == 0);
  CHECK(unit_circle_root_count(parse_polynomial("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1")) == 8);
  CHECK(unit_circle_root_count(parse_polynomial("x-1") * parse_polynomial("x-1")) == 2);
}

TEST_CASE("pm1_root_search") {
  auto half = AlgebraicNumber::make(parse_polynomial("2x-1"), 0, 1);
  CHECK(pm1_root_search(*half, 10).status == Pm1Status::NotFound);
  auto golden = AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1);
  auto r = pm1_root_search(*golden, 3);
  REQUIRE(r.status == Pm1Status::Found);
  CHECK(r.witness->to_string() == "x^2 + x - 1");
  auto third = AlgebraicNumber::make(parse_polynomial("3x-1"), 0, 1);
  CHECK(pm1_root_search(*third, 12).status == Pm1Status::NotFound);
  CHECK_THROWS(pm1_root_search(*third, 41));
  Pm1Config tiny;
  tiny.memory_budget_entries = 100;
  CHECK(pm1_root_search(*third, 12, tiny).status == Pm1Status::BoundExceeded);
}

TEST_CASE("verbatim polynomial parsing keeps the content") {
  auto q = parse_polynomial_verbatim("2x-4");
  REQUIRE(q.degree() == 1);
  CHECK(q.coeff(0) == -4);
  CHECK(q.coeff(1) == 2);
  CHECK(parse_polynomial("2x-4").coeff(0) == -2);
  CHECK(parse_polynomial_verbatim("-2").degree() == 0);
  CHECK_THROWS_AS(parse_polynomial_verbatim("0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_polynomial("7"), std::invalid_argument);
}
