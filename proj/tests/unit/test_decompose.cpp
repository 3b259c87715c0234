#include "bc/decompose.hpp"

#include "doctest.h"

#include <cmath>

using namespace bc;

namespace {
DiscreteMeasure R(std::vector<std::pair<Rational, Rational>> a) { return DiscreteMeasure::from_rational_atoms(a); }
AlgebraicPtr golden() { return AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1); }

DiscreteMeasure on_interval(Rng& rng, long N, MassProfile prof) {
  auto m = random_integer_measure(rng, 1, static_cast<std::size_t>(N), prof);
  return m;
}
}  // namespace

TEST_CASE("l2_l1_split examples") {
  std::vector<std::pair<Rational, Rational>> u;
  for (long n = 1; n <= 8; ++n) u.push_back({n, Rational(1, 8)});
  auto chi = R(u);
  auto s = l2_l1_split(chi, 8);
  CHECK(s.f == chi);
  CHECK(s.g.empty());
  CHECK(s.f_dist_sq == 0);

  auto d = l2_l1_split(dirac(Position::rational(1)), 4);
  CHECK(d.f == R({{1, Rational(1, 4)}}));
  CHECK(d.g == R({{1, Rational(3, 4)}}));
  CHECK(d.g_l1 == Rational(3, 4));
  CHECK(d.missing_entropy == doctest::Approx(2.0));

  CHECK_THROWS_AS(l2_l1_split(dirac(Position::rational(0)), 4), std::invalid_argument);
  CHECK_THROWS_AS(l2_l1_split(dirac(Position::rational(5)), 4), std::invalid_argument);
}

TEST_CASE("l2_l1_split bounds on random measures") {
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    auto prof = k % 3 == 0 ? MassProfile::Dirichlet : (k % 3 == 1 ? MassProfile::Random : MassProfile::Uniform);
    auto mu = on_interval(rng, 64, prof);
    auto s = l2_l1_split(mu, 64);
    CHECK(add(s.f, s.g) == mu);
    CHECK(s.f_l1 + s.g_l1 == 1);
    CHECK(s.f_sup <= Rational(2, 64));
  }
}

TEST_CASE("l2_entropy_bound") {
  std::vector<std::pair<Rational, Rational>> u;
  for (long n = 1; n <= 16; ++n) u.push_back({n, Rational(1, 16)});
  auto r0 = l2_entropy_bound(R(u), 16);
  CHECK(std::fabs(r0.lhs.value) < 1e-15);
  CHECK(r0.rhs.value == 0);
  auto r1 = l2_entropy_bound(dirac(Position::rational(1)), 2);
  CHECK(r1.lhs.value == doctest::Approx(1.0));
  CHECK(r1.rhs.value == doctest::Approx(2.0));
  CHECK(r1.pass);
  Rng rng(5);
  for (long M : {8L, 64L, 256L})
    for (int k = 0; k < 100; ++k) {
      auto rep = l2_entropy_bound(on_interval(rng, M, k % 2 ? MassProfile::Dirichlet : MassProfile::Random), M);
      CHECK(rep.margin >= -1e-9);
    }
}

TEST_CASE("bernoulli_extract examples") {
  Rational r(1, 3);
  auto pair = bernoulli_pair(Position::rational(0), r, 1);
  auto d = bernoulli_extract(pair, r);
  CHECK(d.residual.empty());
  REQUIRE(d.pairs.size() == 1);
  CHECK(d.extracted == 1);

  auto far = R({{0, Rational(1, 2)}, {10 * r, Rational(1, 2)}});
  auto d2 = bernoulli_extract(far, r);
  CHECK(d2.pairs.empty());
  CHECK(d2.residual == far);

  auto three = R({{0, Rational(1, 3)}, {r, Rational(1, 3)}, {2 * r, Rational(1, 3)}});
  auto d3 = bernoulli_extract(three, r);
  CHECK(d3.extracted == Rational(2, 3));
  CHECK(d3.residual == R({{2 * r, Rational(1, 3)}}));
  CHECK(!has_in_band_pair(d3.residual, r));
  CHECK(three.total_mass() - d3.extracted == exhaustive_min_residual(three, r));
  CHECK(d3.reconstruct() == three);
  auto js = d3.to_json();
  CHECK(js["pairs"].size() == 1);
}

TEST_CASE("bernoulli_extract on random measures") {
  int with_hypothesis = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto mu = random_measure(seed, 3 + seed % 40, Rational(static_cast<long>(seed % 7 + 1)), MassProfile::Dirichlet);
    for (Rational r : {Rational(1, 8), Rational(1, 2), Rational(2)}) {
      auto d = bernoulli_extract(mu, r);  // throws if the mass bound fails under the hypothesis
      CHECK(d.reconstruct() == mu);
      CHECK(!has_in_band_pair(d.residual, r));
      for (const auto& p : d.pairs) {
        Rational dist = p.distance()[0];
        CHECK(dist >= r / 2);
        CHECK(dist <= 2 * r);
      }
      if (d.hypothesis) {
        ++with_hypothesis;
        CHECK(to_ld(d.extracted) >= d.bound - 1e-12);
      }
    }
  }
  CHECK(with_hypothesis > 0);
  // Small instances against the exhaustive oracle: greedy is within the residual of some order.
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto mu = random_measure(seed, 6, 2, MassProfile::Random);
    auto d = bernoulli_extract(mu, Rational(1, 2));
    CHECK(d.residual.total_mass() >= exhaustive_min_residual(mu, Rational(1, 2)));
  }
}

TEST_CASE("bernoulli_extract on algebraic positions") {
  auto g = golden();
  auto lm = level_measure(g, Rational(1, 2), LevelInterval::standard(8));
  auto d = bernoulli_extract(lm, Rational(1, 20));
  CHECK(d.reconstruct() == lm);
  CHECK(!has_in_band_pair(d.residual, Rational(1, 20)));
}

TEST_CASE("support_clusters") {
  Rational r0(1, 10);
  auto two = R({{0, Rational(1, 2)}, {8 * r0, Rational(1, 2)}});
  auto c = support_clusters(two, r0, 5 * r0);
  REQUIRE(c.has_value());
  CHECK(c->size() == 2);
  CHECK(std::fabs(doubling_defect(two, 2 * r0).value) <= 1e-9);

  Rational r1 = 5 * r0;
  auto three = R({{0, Rational(1, 3)}, {r0 / 2, Rational(1, 3)}, {r1 + r0, Rational(1, 3)}});
  auto c3 = support_clusters(three, r0, r1);
  REQUIRE(c3.has_value());
  REQUIRE(c3->size() == 2);
  CHECK((*c3)[0].first == 0);
  CHECK((*c3)[0].last == 1);
  CHECK((*c3)[1].first == 2);

  auto spread = R({{0, Rational(1, 4)}, {r0, Rational(1, 4)}, {2 * r0, Rational(1, 4)}, {3 * r0, Rational(1, 4)}});
  CHECK(!support_clusters(spread, r0, 4 * r0).has_value());
  CHECK_THROWS(support_clusters(spread, r0, 3 * r0));

  // Identity on random clustered supports, all admissible scales on a grid.
  Rng rng(77);
  for (int k = 0; k < 20; ++k) {
    std::vector<std::pair<Rational, Rational>> at;
    for (int cl = 0; cl < 5; ++cl)
      for (int a = 0; a < 3; ++a)
        at.push_back({Rational(cl * 100) + Rational(rng.uniform_int(0, 64), 64), Rational(rng.uniform_int(1, 9), 1)});
    Rational tot = 0;
    for (auto& x : at) tot += x.second;
    for (auto& x : at) x.second /= tot;
    auto mu = R(at);
    auto cs = support_clusters(mu, 1, 90);
    REQUIRE(cs.has_value());
    for (Rational rr : {Rational(2), Rational(5), Rational(13, 2), Rational(45)}) CHECK(std::fabs(doubling_defect(mu, rr).value) <= 1e-9);
  }
}

TEST_CASE("entropy sandwich for sub-measures") {
  Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    auto mu = random_measure(static_cast<std::uint64_t>(500 + k), 30, 4, MassProfile::Dirichlet);
    // Split off a random part of total mass ≤ 1/2.
    std::vector<Position> pn, pe;
    std::vector<Rational> mn, me;
    Rational taken = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      Rational m = mu.mass(i);
      Rational part = m * Rational(rng.uniform_int(0, 8), 8);
      if (taken + part > Rational(1, 2)) part = 0;
      taken += part;
      if (m - part > 0) {
        pn.push_back(mu.position(i));
        mn.push_back(m - part);
      }
      if (part > 0) {
        pe.push_back(mu.position(i));
        me.push_back(part);
      }
    }
    auto nu = DiscreteMeasure::from_atoms(pn, mn);
    Rational r(1, 1 + k % 9);
    long double hn = cond_entropy(nu, r, 2 * r).value, hm = cond_entropy(mu, r, 2 * r).value;
    long double e = to_ld(taken);
    CHECK(hn <= hm + 1e-9);
    CHECK(hm <= hn + (e > 0 ? 3 * e * std::log2(1 / e) : 0) + 1e-9);
  }
}
