#include "bc/measure.hpp"

#include "doctest.h"

#include <map>

using namespace bc;

namespace {
AlgebraicPtr golden() { return AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1); }
AlgebraicPtr half() { return AlgebraicNumber::make(parse_polynomial("2x-1"), 0, 1); }
DiscreteMeasure R(std::vector<std::pair<Rational, Rational>> a) { return DiscreteMeasure::from_rational_atoms(a); }
}  // namespace

TEST_CASE("dirac and bernoulli_pair") {
  auto d = dirac(Position::rational(Rational(1, 2)));
  REQUIRE(d.size() == 1);
  CHECK(d.position_rational(0) == Rational(1, 2));
  CHECK(d.total_mass() == 1);
  auto g = golden();
  auto dl = dirac(Position::algebraic(g, {0, 1}));
  CHECK(dl.size() == 1);
  CHECK(dl.position_coeffs(0) == std::vector<Rational>{0, 1});

  auto b = bernoulli_pair(Position::rational(0), 2, 1);
  CHECK(b == R({{-1, Rational(1, 2)}, {1, Rational(1, 2)}}));
  auto b2 = bernoulli_pair(Position::rational(1), 1, Rational(1, 2));
  CHECK(b2 == R({{Rational(1, 2), Rational(1, 4)}, {Rational(3, 2), Rational(1, 4)}}));
  CHECK_THROWS(bernoulli_pair(Position::rational(0), 0, 1));
}

TEST_CASE("construction merges and sorts") {
  auto m = R({{3, Rational(1, 4)}, {1, Rational(1, 4)}, {3, Rational(1, 2)}});
  REQUIRE(m.size() == 2);
  CHECK(m.position_rational(0) == 1);
  CHECK(m.mass(1) == Rational(3, 4));
}

TEST_CASE("convolve") {
  auto a = dirac(Position::rational(2)), b = dirac(Position::rational(Rational(-1, 3)));
  CHECK(convolve(a, b) == dirac(Position::rational(Rational(5, 3))));
  auto h = R({{0, Rational(1, 2)}, {1, Rational(1, 2)}});
  CHECK(convolve(h, h) == R({{0, Rational(1, 4)}, {1, Rational(1, 2)}, {2, Rational(1, 4)}}));
  auto r1 = random_measure(3, 40, 10, MassProfile::Random);
  auto r2 = random_measure(4, 30, 7, MassProfile::Dirichlet);
  auto r3 = random_measure(5, 10, 3, MassProfile::Uniform);
  CHECK(convolve(r1, r2) == convolve(r2, r1));
  CHECK(convolve(convolve(r1, r2), r3) == convolve(r1, convolve(r2, r3)));
  CHECK(convolve(r1, r2).total_mass() == r1.total_mass() * r2.total_mass());
  // Sparse supports take the generic path.
  auto s = R({{0, Rational(1, 2)}, {Integer("1000000000000"), Rational(1, 2)}});
  CHECK(convolve(s, s).size() == 3);
}

TEST_CASE("golden convolution matches brute-force enumeration") {
  auto g = golden();
  auto pa = DiscreteMeasure::from_atoms({Position::algebraic(g, {0, 1}), Position::algebraic(g, {0, -1})},
                                        {Rational(1, 2), Rational(1, 2)});
  auto sq = g->power_coeffs(2);
  auto pb = DiscreteMeasure::from_atoms({Position::algebraic(g, sq), Position::algebraic(g, {-sq[0], -sq[1]})},
                                        {Rational(1, 2), Rational(1, 2)});
  auto c = convolve(pa, pb);
  CHECK(c.size() == 4);
  bool has_one = false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.position_coeffs(i) == std::vector<Rational>{1, 0}) has_one = true;
  CHECK(has_one);  // λ + λ² = 1
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.compare_positions(i - 1, i) < 0);
}

TEST_CASE("level_measure") {
  auto h = half();
  auto m = level_measure(h, Rational(1, 3), LevelInterval::standard(1));
  CHECK(m == R({{-1, Rational(2, 3)}, {1, Rational(1, 3)}}));
  auto m3 = level_measure(h, Rational(1, 2), LevelInterval::standard(3));
  CHECK(m3.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(m3.mass(i) == Rational(1, 8));
  auto g = golden();
  auto g3 = level_measure(g, Rational(1, 2), LevelInterval::standard(3));
  CHECK(g3.size() < 8);
  CHECK(g3.total_mass() == 1);
  // Brute force over sign sequences with exact reduction.
  for (int l = 1; l <= 10; ++l) {
    std::map<std::vector<Rational>, Rational> bf;
    for (int mask = 0; mask < (1 << l); ++mask) {
      std::vector<Rational> v(2, Rational(0));
      for (int n = 0; n < l; ++n) {
        auto pc = g->power_coeffs(n);
        int s = (mask >> n) & 1 ? 1 : -1;
        v[0] += s * pc[0];
        v[1] += s * pc[1];
      }
      bf[v] += Rational(1, 1 << l);
    }
    auto lm = level_measure(g, Rational(1, 2), LevelInterval::standard(l));
    REQUIRE(lm.size() == bf.size());
    for (std::size_t i = 0; i < lm.size(); ++i) CHECK(bf.at(lm.position_coeffs(i)) == lm.mass(i));
    for (std::size_t i = 1; i < lm.size(); ++i) CHECK(lm.compare_positions(i - 1, i) < 0);
    if (l >= 3) CHECK(lm.size() < (1u << l));
    if (l == 2) CHECK(lm.size() == 4);
  }
  for (int l = 1; l <= 16; ++l) CHECK(level_measure(h, Rational(1, 2), LevelInterval::standard(l)).size() == (1u << l));
  CHECK_THROWS_AS(level_measure(h, Rational(1, 2), LevelInterval::standard(30)), ResourceLimit);
  CHECK_THROWS(level_measure(h, Rational(1), LevelInterval::standard(3)));
  auto empty = level_measure(h, Rational(1, 2), {LevelEndpoint::rational(Rational(3, 2), false), LevelEndpoint::rational(2, true)});
  CHECK(empty == dirac(Position::rational(0)));
}

TEST_CASE("level factorization identity") {
  auto g = golden();
  auto full = level_measure(g, Rational(1, 3), LevelInterval::standard(9));
  auto top = level_measure(g, Rational(1, 3), {LevelEndpoint::lambda_power(4, false), LevelEndpoint::rational(1, true)});
  auto bottom = level_measure(g, Rational(1, 3), {LevelEndpoint::lambda_power(9, false), LevelEndpoint::lambda_power(4, true)});
  CHECK(convolve(top, bottom) == full);
}

TEST_CASE("restrict and affine") {
  auto m = R({{0, Rational(1, 2)}, {1, Rational(1, 2)}});
  CHECK(restrict(m, RealInterval::closed(Rational(1, 2), 2)) == R({{1, Rational(1, 2)}}));
  CHECK(restrict(m, RealInterval::all()) == m);
  CHECK(restrict(m, {Rational(0), Rational(1), false, true}).size() == 1);
  CHECK(affine(dirac(Position::rational(1)), 2, 0) == dirac(Position::rational(2)));
  CHECK(affine(m, 1, 0) == m);
  CHECK(affine(bernoulli_pair(Position::rational(0), 2, 1), Rational(1, 2), 1) ==
        R({{Rational(1, 2), Rational(1, 2)}, {Rational(3, 2), Rational(1, 2)}}));
  CHECK(reflect(reflect(m)) == m);
  auto g = golden();
  auto lm = level_measure(g, Rational(1, 2), LevelInterval::standard(6));
  auto r = restrict(lm, RealInterval::closed(0, 10));
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < lm.size(); ++i)
    if (lm.position_enclosure(i, 100).lo_ld() >= 0) ++cnt;
  CHECK(r.size() == cnt);
}

TEST_CASE("min_gap") {
  CHECK(min_gap(R({{0, Rational(1, 2)}, {1, Rational(1, 2)}})).lo == 1);
  for (int l = 2; l <= 12; ++l) {
    auto gap = min_gap(level_measure(half(), Rational(1, 2), LevelInterval::standard(l)));
    CHECK(gap.lo == Rational(1, Integer(1) << (l - 2)));
  }
  auto gm = min_gap(level_measure(golden(), Rational(1, 2), LevelInterval::standard(10)));
  CHECK(gm.lo > 0);
  CHECK(gm.hi - gm.lo < Rational(1, 1000000));
  CHECK_THROWS(min_gap(dirac(Position::rational(0))));
}

TEST_CASE("random_measure and JSON") {
  auto a = random_measure(1, 1, 1, MassProfile::Uniform);
  CHECK(a.size() == 1);
  CHECK(a.total_mass() == 1);
  CHECK(random_measure(9, 50, 5, MassProfile::Dirichlet) == random_measure(9, 50, 5, MassProfile::Dirichlet));
  auto b = random_measure(7, 100, 1024, MassProfile::Uniform);
  CHECK(b.size() == 100);
  CHECK(b.total_mass() == 1);
  CHECK(DiscreteMeasure::from_json(b.to_json()) == b);
  auto lm = level_measure(golden(), Rational(1, 3), LevelInterval::standard(7));
  CHECK(DiscreteMeasure::from_json(lm.to_json()) == lm);
  CHECK_THROWS(DiscreteMeasure::from_json(nlohmann::json::parse(R"({"atoms":[{"pos":"1/0","mass":"1"}]})")));
}
