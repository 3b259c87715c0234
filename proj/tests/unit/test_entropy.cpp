#include "bc/entropy.hpp"

#include "doctest.h"

#include <cmath>
#include <map>

using namespace bc;

namespace {
AlgebraicPtr golden() { return AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1); }
AlgebraicPtr half() { return AlgebraicNumber::make(parse_polynomial("2x-1"), 0, 1); }
DiscreteMeasure R(std::vector<std::pair<Rational, Rational>> a) { return DiscreteMeasure::from_rational_atoms(a); }
long double V(EntropyValue v) { return v.value; }

// Midpoint rule for ∫_0^1 H(⌊x/r + t⌋) dt on long double positions.
long double riemann(const DiscreteMeasure& mu, long double r, int points) {
  long double total = 0;
  for (int k = 0; k < points; ++k) {
    long double t = (k + 0.5L) / points;
    std::map<long long, long double> b;
    for (std::size_t i = 0; i < mu.size(); ++i)
      b[static_cast<long long>(std::floor(mu.approx(i) / r + t))] += to_ld(mu.mass(i));
    long double h = 0;
    for (auto& [key, m] : b) h -= m * std::log2(m);
    total += h;
  }
  return total / points;
}
}  // namespace

TEST_CASE("shannon") {
  CHECK(V(shannon(dirac(Position::rational(0)))) == doctest::Approx(0.0));
  CHECK(V(shannon(R({{0, Rational(1, 2)}, {1, Rational(1, 2)}}))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(V(shannon(R({{0, Rational(1, 4)}, {1, Rational(1, 4)}}))) == doctest::Approx(0.5).epsilon(1e-15));
  auto u = random_measure(1, 1000, 1, MassProfile::Uniform);
  CHECK(std::fabs(V(shannon(u)) - std::log2(1000.0L)) < 1e-12);
}

TEST_CASE("scale_entropy examples") {
  Rational r(3, 7);
  CHECK(std::fabs(V(scale_entropy(dirac(Position::rational(5)), r))) < 1e-15);
  CHECK(std::fabs(V(scale_entropy(R({{0, Rational(1, 2)}, {r / 2, Rational(1, 2)}}), r)) - 0.5L) < 1e-15);
  CHECK(std::fabs(V(scale_entropy(R({{0, Rational(1, 2)}, {r, Rational(1, 2)}}), r)) - 1.0L) < 1e-15);
  auto four = R({{0, Rational(1, 4)}, {1, Rational(1, 4)}, {2, Rational(1, 4)}, {3, Rational(1, 4)}});
  CHECK(std::fabs(V(scale_entropy(four, 1)) - 2.0L) < 1e-15);
  CHECK(std::fabs(V(scale_entropy(R({{0, Rational(1, 4)}, {1, Rational(1, 4)}}), 1)) - 0.5L) < 1e-15);
}

TEST_CASE("scale_entropy against a Riemann sum") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto mu = random_measure(seed, 50, 10, MassProfile::Dirichlet);
    Rational r(7, 10);
    CHECK(std::fabs(V(scale_entropy(mu, r)) - riemann(mu, 0.7L, 100000)) <= 1e-4);
  }
  auto lm = level_measure(golden(), Rational(1, 3), LevelInterval::standard(8));
  CHECK(std::fabs(V(scale_entropy(lm, Rational(1, 10))) - riemann(lm, 0.1L, 100000)) <= 1e-4);
}

TEST_CASE("breakpoint sweep agrees with smoothing") {
  long double worst = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto mu = random_measure(seed, 5 + seed * 7, Rational(static_cast<long>(seed), 3), MassProfile::Random);
    for (Rational r : {Rational(1, 10), Rational(1, 3), Rational(2), Rational(1, 1000)}) {
      worst = std::max(worst, std::fabs(V(scale_entropy(mu, r)) - V(scale_entropy_via_smoothing(mu, r))));
    }
  }
  CHECK(worst <= 1e-9);
  CHECK(std::fabs(V(scale_entropy_via_smoothing(dirac(Position::rational(0)), 1))) < 1e-15);
  CHECK(std::fabs(V(scale_entropy_via_smoothing(R({{0, Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}}), 1)) - 0.5L) < 1e-15);
  auto lm = level_measure(golden(), Rational(1, 2), LevelInterval::standard(10));
  for (Rational r : {Rational(1, 16), Rational(1, 100), Rational(3, 5)})
    CHECK(std::fabs(V(scale_entropy(lm, r)) - V(scale_entropy_via_smoothing(lm, r))) <= 1e-9);
}

TEST_CASE("algebraic ties are merged exactly") {
  // λ and λ + 1 at scale 1 share their event time.
  auto g = golden();
  auto mu = DiscreteMeasure::from_atoms({Position::algebraic(g, {0, 1}), Position::algebraic(g, {1, 1}), Position::algebraic(g, {2, 0})},
                                        {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  auto rat = R({{Rational(3, 5), Rational(1, 3)}, {Rational(8, 5), Rational(1, 3)}, {2, Rational(1, 3)}});
  // Same bucket pattern as a rational stand-in with the same fractional parts ordering.
  CHECK(std::fabs(V(scale_entropy(mu, 1)) - riemann(mu, 1.0L, 200000)) < 1e-5);
  CHECK(std::fabs(V(scale_entropy(mu, 1)) - V(scale_entropy_via_smoothing(mu, 1))) < 1e-9);
  (void)rat;
  // Atom exactly on a bucket boundary.
  auto on = DiscreteMeasure::from_atoms({Position::algebraic(g, {0, 0}), Position::algebraic(g, {1, 1})}, {Rational(1, 2), Rational(1, 2)});
  CHECK(std::fabs(V(scale_entropy(on, Rational(1, 2))) - V(scale_entropy_via_smoothing(on, Rational(1, 2)))) < 1e-9);
}

TEST_CASE("cond_entropy and properties") {
  auto pair = R({{0, Rational(1, 2)}, {1, Rational(1, 2)}});
  CHECK(std::fabs(V(cond_entropy(pair, 1, 2)) - 0.5L) < 1e-15);
  CHECK(V(cond_entropy(pair, 3, 3)) == 0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto mu = random_measure(seed, 40, 5, MassProfile::Dirichlet);
    for (Rational r : {Rational(1, 64), Rational(1, 7), Rational(1, 2), Rational(3)}) {
      long double c = V(cond_entropy(mu, r, 2 * r));
      CHECK(c >= -1e-9);
      CHECK(c <= 1 + 1e-9);
      CHECK(V(cond_entropy(mu, r, 5 * r)) <= std::log2(5.0L) + 1e-9);
      // Monotone and 2-Lipschitz in log r, also for non-integer ratios.
      Rational r2 = r * Rational(13, 10);
      long double d = V(cond_entropy(mu, r, r2));
      CHECK(d >= -1e-9);
      CHECK(d <= 2 * std::log2(1.3L) + 1e-9);
      // Scaling invariance.
      CHECK(std::fabs(V(scale_entropy(affine(mu, Rational(-5, 3), Rational(1, 9)), r * Rational(5, 3))) - V(scale_entropy(mu, r))) <= 1e-9);
    }
  }
}

TEST_CASE("z_block_entropy") {
  CHECK(V(z_block_entropy(dirac(Position::rational(0)), 2)) == doctest::Approx(0.0));
  for (long M : {2L, 4L, 8L}) {
    std::vector<std::pair<Rational, Rational>> at;
    for (long i = 0; i < M; ++i) at.push_back({i, Rational(1, M)});
    auto u = R(at);
    CHECK(std::fabs(V(z_block_entropy(u, M)) - V(cond_entropy(u, 1, M))) <= 1e-9);
  }
  Rng rng(42);
  for (int k = 0; k < 40; ++k) {
    long M = std::vector<long>{2, 4, 8}[static_cast<std::size_t>(k % 3)];
    auto mu = random_integer_measure(rng, -20 + k, 30 + static_cast<std::size_t>(k), MassProfile::Random);
    CHECK(std::fabs(V(z_block_entropy(mu, M)) - V(cond_entropy(mu, 1, M))) <= 1e-9);
  }
  CHECK_THROWS(z_block_entropy(R({{Rational(1, 2), 1}}), 2));
  CHECK_THROWS(z_block_entropy(dirac(Position::rational(0)), 1));
}

TEST_CASE("hpm and garsia diagnostic") {
  CHECK(V(hpm(dirac(Position::rational(1)))) == doctest::Approx(0.0));
  CHECK(V(hpm(R({{-1, Rational(1, 2)}, {1, Rational(1, 2)}}))) == doctest::Approx(1.0));
  CHECK(V(hpm(R({{-1, Rational(1, 4)}, {1, Rational(3, 4)}}))) == doctest::Approx(0.811278).epsilon(1e-6));
  auto g = golden();
  auto lm = level_measure(g, Rational(1, 2), LevelInterval::standard(1));
  CHECK(V(hpm(lm)) == doctest::Approx(1.0));
  CHECK(V(garsia_diagnostic(R({{0, Rational(1, 2)}, {1, Rational(1, 2)}}), 1)) == doctest::Approx(-1.0));
  for (int n = 1; n <= 10; ++n)
    CHECK(V(garsia_diagnostic(dirac(Position::rational(0)), Rational(1, Integer(1) << n))) == doctest::Approx(n));
  auto h = half();
  long double worst = 0;
  for (int l = 4; l <= 16; l += 4) {
    auto m = level_measure(h, Rational(1, 2), LevelInterval::standard(l));
    worst = std::max(worst, V(garsia_diagnostic(m, Rational(1, Integer(1) << l))));
  }
  CHECK(worst < 2);
}

TEST_CASE("dyadic scales double exactly") {
  for (Rational s : {Rational(0), Rational(-37, 16), Rational(5, 3), Rational(-100)}) {
    CHECK(dyadic_scale(s + 1) == 2 * dyadic_scale(s));
    CHECK(std::fabs(log2_ld(dyadic_scale(s)) - to_ld(s)) < 1e-15);
  }
  CHECK(dyadic_scale(0) == 1);
}

TEST_CASE("entropy_profile and cell bounds") {
  auto mu = random_measure(9, 200, 1, MassProfile::Uniform);
  auto p = entropy_profile(mu, -10, -2, Rational(1, 8));
  REQUIRE(p.values.size() == 65);
  CHECK(p.scale_values.size() == 73);
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    CHECK(p.values[j] >= -1e-9);
    CHECK(p.values[j] <= 1 + 1e-9);
    CHECK(std::fabs(p.values[j] - V(cond_entropy(mu, p.t[j], 2 * p.t[j]))) < 1e-12);
  }
  // Cell bounds sit below the sampled values at both ends and below a dense resample.
  for (std::size_t j = 0; j + 1 < p.values.size(); ++j) {
    long double lb = cell_lower_bound(p, j);
    CHECK(lb <= p.values[j] + 1e-12);
    CHECK(lb <= p.values[j + 1] + 1e-12);
    Rational mid = p.sigma[j] + Rational(1, 16);
    Rational t = dyadic_scale(mid);
    CHECK(lb <= V(cond_entropy(mu, t, 2 * t)) + 1e-12);
  }
  CHECK_THROWS(entropy_profile(mu, 0, 1, Rational(2, 7)));
  auto csv = profile_to_csv(p);
  CHECK(csv.rfind("sigma,t,value,abs_error\n", 0) == 0);
}

TEST_CASE("separated_level_set_count") {
  // A synthetic profile carries only the 4-Lipschitz bound: a sample at 1 − 2α
  // excludes radius α/4, which covers a 1/8 grid once α ≥ 1/4.
  long double alpha = 0.3L;
  auto flat_low = make_profile(0, Rational(1, 8), std::vector<long double>(81, 1 - 2 * alpha));
  auto c0 = separated_level_set_count(flat_low, alpha, 0, 10);
  auto c0s = separated_level_set_count(flat_low, 0.01L, 0, 10);
  CHECK(c0s.lo == 0);
  CHECK(c0.lo == 0);
  CHECK(c0.hi == 0);
  auto flat_one = make_profile(0, Rational(1, 8), std::vector<long double>(81, 1.0L));
  auto c1 = separated_level_set_count(flat_one, alpha, 0, Rational(15, 2));
  CHECK(c1.lo == 8);
  CHECK(c1.hi == 8);
  // Two bumps of width 1/2 above threshold, 3 apart.
  std::vector<long double> v(81, 0.0L);
  for (int j = 0; j <= 4; ++j) {
    v[static_cast<std::size_t>(16 + j)] = 1.0L;
    v[static_cast<std::size_t>(40 + j)] = 1.0L;
  }
  auto bumps = make_profile(0, Rational(1, 8), v);
  auto c2 = separated_level_set_count(bumps, alpha, 0, 10);
  CHECK(c2.lo == 2);
  CHECK(c2.hi == 2);
  CHECK_THROWS(separated_level_set_count(flat_one, alpha, 0, 20));
  // Real profile against a dense resample: a greedy 1-separated packing of
  // fine-grid points above threshold is a valid lower bound for the true count.
  std::vector<std::pair<Rational, Rational>> at;
  for (int i = 0; i < 1024; ++i) at.push_back({Rational(i, 64), Rational(1, 1024)});
  auto lattice = R(at);
  auto prof = entropy_profile(lattice, -10, 4, Rational(1, 16));
  auto fine = entropy_profile(lattice, -10, 4, Rational(1, 128));
  for (long double a : {0.02L, 0.1L, 0.3L}) {
    auto cl = separated_level_set_count(prof, a, -10, 4);
    long dense = 0;
    long double last = -1e9L;
    for (std::size_t j = 0; j < fine.values.size(); ++j) {
      long double s = to_ld(fine.sigma[j]);
      if (fine.values[j] > 1 - a && s >= last + 1) {
        ++dense;
        last = s;
      }
    }
    CHECK(cl.lo <= cl.hi);
    CHECK(dense <= cl.hi);
    CHECK(cl.hi - cl.lo <= 2);
  }
  CHECK_THROWS(separated_level_set_count(make_profile(0, Rational(1, 4), std::vector<long double>(41, 1.0L)), alpha, 0, 5));
}

TEST_CASE("k_he_check") {
  Rational r(1, 17);
  auto d = k_he_check(dirac(Position::rational(0)), r, 0, 1);
  CHECK(d.status == KHeStatus::Fails);
  REQUIRE(d.witness_t.has_value());
  CHECK(d.threshold == doctest::Approx(0.75));
  auto vac = k_he_check(dirac(Position::rational(0)), r, 5, 1);
  CHECK(vac.status == KHeStatus::Holds);
  CHECK(vac.vacuous);
  CHECK_THROWS(k_he_check(dirac(Position::rational(0)), Rational(1, 8), 0, 1));
  // Uniform lattice far finer than the window's smallest scale.
  std::vector<std::pair<Rational, Rational>> at;
  const int n = 1 << 14;
  for (int i = 0; i < n; ++i) at.push_back({Rational(i, 1 << 10), Rational(1, n)});
  auto u = R(at);
  auto res = k_he_check(u, r, 0, 1);
  CHECK(res.status == KHeStatus::Holds);
  CHECK(!res.vacuous);
  CHECK(res.certified_min >= res.threshold);
  CHECK(res.grid_min >= res.certified_min);
  CHECK(to_string(KHeStatus::Undecided) == "UNDECIDED");
}
