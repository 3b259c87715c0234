#include "bc/criteria.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "UNKNOWN";
  }
}

namespace {

Interval iv(const Rational& q, mpfr_prec_t prec) { return Interval(q, prec); }
Interval iv(const Integer& z, mpfr_prec_t prec) { return Interval(Rational(z), prec); }

RationalInterval to_rational(const Interval& x) { return {x.lo_rational(), x.hi_rational()}; }

Integer floor_of(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

Rational ten_pow(int e) {
  return e >= 0 ? Rational(pow_int(10, static_cast<unsigned long>(e))) : Rational(1, pow_int(10, static_cast<unsigned long>(-e)));
}

/// 10^{-37} / (log(M+1) (log log(M+2))^3) for M in the interval.
Interval explicit_threshold(const Interval& M, mpfr_prec_t prec) {
  Interval one(Rational(1), prec), two(Rational(2), prec);
  Interval a = (M + one).log2();
  Interval b = (M + two).log2().log2();
  return Interval(ten_pow(-37), prec) / (a * b.pow_ui(3));
}

bool p_in_range(const Rational& p) { return p >= Rational(1, 4) && p <= Rational(3, 4); }

bool is_unit_poly(const IntPolynomial& P) {
  const Integer& lead = P.leading();
  const Integer& c0 = P.coeffs().front();
  return abs(lead) == 1 && abs(c0) == 1;
}

/// Sets verdict from the decided inequality and the applicability flags.
void settle(CriterionReport& r, std::optional<bool> holds, bool applicable) {
  r.inequality_holds = holds;
  if (!holds)
    r.verdict = Verdict::Unknown;
  else if (!*holds)
    r.verdict = Verdict::Fail;
  else
    r.verdict = applicable ? Verdict::Pass : Verdict::Unknown;
}

void p_note(CriterionReport& r) {
  if (!p_in_range(r.p)) r.notes.push_back("p outside [1/4, 3/4]: the explicit condition does not apply");
}

template <class Eval>
CriterionReport escalate(const CriterionConfig& cfg, Eval eval) {
  CriterionReport last;
  for (int bits = std::max(cfg.bits, 32);; bits *= 2) {
    bits = std::min(bits, std::max(cfg.max_bits, cfg.bits));
    last = eval(static_cast<mpfr_prec_t>(bits));
    last.precision_bits = bits;
    if (last.inequality_holds.has_value() || bits >= cfg.max_bits) break;
  }
  if (!last.inequality_holds) last.notes.push_back("enclosures overlap at the maximal precision");
  return last;
}

}  // namespace

nlohmann::json CriterionReport::to_json() const {
  auto ri = [](const std::optional<RationalInterval>& r) -> nlohmann::json {
    if (!r) return nullptr;
    return {{"lo", to_fraction_string(r->lo)}, {"hi", to_fraction_string(r->hi)}, {"approx", static_cast<double>(to_ld(r->lo))}};
  };
  nlohmann::json j;
  j["criterion"] = criterion;
  j["lambda"] = lambda;
  j["p"] = to_fraction_string(p);
  j["mahler"] = ri(mahler);
  j["threshold"] = ri(threshold);
  j["one_minus_lambda"] = ri(one_minus_lambda);
  j["verdict"] = to_string(verdict);
  if (inequality_holds)
    j["inequality_holds"] = *inequality_holds;
  else
    j["inequality_holds"] = nullptr;
  j["pm1_status"] = pm1_status;
  j["notes"] = notes;
  j["precision_bits"] = precision_bits;
  return j;
}

// ---------------------------------------------------------------- explicit

CriterionReport explicit_condition(const AlgebraicPtr& lambda, const Rational& p, const CriterionConfig& cfg) {
  if (!lambda || lambda->compare(0) <= 0 || lambda->compare(1) >= 0) throw std::invalid_argument("λ must lie in (0, 1)");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
  const IntPolynomial& P = lambda->minpoly();
  std::string pm1;
  std::vector<std::string> pm1_notes;
  bool pm1_ok = false;
  if (!is_unit_poly(P)) {
    pm1 = "NOT_A_UNIT";
    pm1_ok = true;
    pm1_notes.push_back("λ is not an algebraic unit, hence not a root of a {-1,0,1} polynomial");
  } else {
    auto res = pm1_root_search(*lambda, cfg.pm1_degree_bound);
    pm1 = to_string(res.status);
    if (res.status == Pm1Status::NotFound) {
      pm1_ok = true;
      pm1_notes.push_back("no {-1,0,1} polynomial of degree < " + std::to_string(res.degree_bound) +
                          " vanishes at λ (verified up to degree " + std::to_string(res.degree_bound) + " only)");
    } else if (res.status == Pm1Status::Found) {
      pm1_notes.push_back("λ is a root of " + res.witness->to_string() + ": the explicit condition does not apply");
    } else {
      pm1_notes.push_back("{-1,0,1} search exceeded its budget: applicability unknown");
    }
  }
  const int mbits = std::max(cfg.bits, 128);
  MahlerEnclosure M = mahler_measure(P, mbits);
  return escalate(cfg, [&](mpfr_prec_t prec) {
    CriterionReport r;
    r.criterion = "explicit";
    r.lambda = "root of " + P.to_string() + " in " + to_fraction_string(lambda->isolating_interval().lo) + ".." +
               to_fraction_string(lambda->isolating_interval().hi);
    r.p = p;
    r.pm1_status = pm1;
    r.notes = pm1_notes;
    p_note(r);
    r.mahler = RationalInterval{M.lo, M.hi};
    Interval T = explicit_threshold(Interval(M.lo, M.hi, prec), prec);
    Interval oml = Interval(Rational(1), prec) - lambda->enclosure(prec);
    r.threshold = to_rational(T);
    r.one_minus_lambda = to_rational(oml);
    std::optional<bool> holds;
    if (certainly_less(oml, T))
      holds = true;
    else if (certainly_less(T, oml))
      holds = false;
    settle(r, holds, pm1_ok && p_in_range(p));
    return r;
  });
}

// ---------------------------------------------------------------- rational

namespace {

/// 10^{-37} b / (log(b+1) (log log(b+2))^3)
Interval rational_rhs(const Integer& b, mpfr_prec_t prec) {
  Interval B = iv(b, prec);
  return B * explicit_threshold(B, prec);
}

std::optional<bool> rational_holds(const Integer& a, const Integer& b, mpfr_prec_t prec) {
  Interval A = iv(a, prec), R = rational_rhs(b, prec);
  if (certainly_less(A, R)) return true;
  if (!certainly_less(R, A) && !(A.lo_rational() >= R.hi_rational())) return std::nullopt;
  return false;
}

}  // namespace

CriterionReport rational_condition(const Integer& a, const Integer& b, const Rational& p, const CriterionConfig& cfg) {
  if (!(a > 0 && a < b)) throw std::invalid_argument("rational condition needs 0 < a < b");
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (g != 1) throw std::invalid_argument("rational condition needs gcd(a, b) = 1");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
  return escalate(cfg, [&](mpfr_prec_t prec) {
    CriterionReport r;
    r.criterion = "rational";
    r.lambda = "1 - " + a.get_str() + "/" + b.get_str();
    r.p = p;
    r.pm1_status = "NOT_A_UNIT";
    r.notes.push_back("M_λ = b for coprime a, b; λ is not an algebraic integer");
    p_note(r);
    r.mahler = RationalInterval{Rational(b), Rational(b)};
    Interval B = iv(b, prec);
    r.threshold = to_rational(explicit_threshold(B, prec));
    Rational oml(a, b);
    oml.canonicalize();
    r.one_minus_lambda = RationalInterval{oml, oml};
    settle(r, rational_holds(a, b, prec), p_in_range(p));
    return r;
  });
}

Integer rational_boundary(const Integer& a, const CriterionConfig& cfg) {
  if (a <= 0) throw std::invalid_argument("a must be positive");
  auto ok = [&](const Integer& b) {
    for (int bits = std::max(cfg.bits, 256); bits <= std::max(cfg.max_bits, 256); bits *= 2)
      if (auto h = rational_holds(a, b, bits)) return *h;
    throw std::runtime_error("rational_boundary: undecided comparison at b = " + b.get_str());
  };
  Integer hi = a + 1;
  while (!ok(hi)) hi *= 2;
  Integer lo = hi / 2;  // fails (or is ≤ a)
  if (lo <= a) lo = a;
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------- nth root

namespace {

Interval nth_root_rhs(const Integer& n, mpfr_prec_t prec) {
  Interval N = iv(n, prec);
  Interval one(Rational(1), prec), two(Rational(2), prec);
  return Interval(ten_pow(37), prec) * N.ln() * (N + one).log2() * (N + two).log2().log2().pow_ui(3);
}

}  // namespace

CriterionReport nth_root_condition(const Integer& n, const Integer& k, const Rational& p, const CriterionConfig& cfg) {
  if (n < 2 || k < 1) throw std::invalid_argument("nth root condition needs n ≥ 2 and k ≥ 1");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
  return escalate(cfg, [&](mpfr_prec_t prec) {
    CriterionReport r;
    r.criterion = "nth-root";
    r.lambda = n.get_str() + "^(-1/" + k.get_str() + ")";
    r.p = p;
    r.pm1_status = "NOT_A_UNIT";
    r.notes.push_back("M_λ ≤ M_n = n; λ^k = 1/n is not an algebraic integer");
    p_note(r);
    r.mahler = RationalInterval{Rational(1), Rational(n)};
    Interval R = nth_root_rhs(n, prec);
    r.threshold = to_rational(R);
    Interval K = iv(k, prec);
    std::optional<bool> holds;
    if (certainly_less(R, K))
      holds = true;
    else if (!(R.lo_rational() < Rational(k)))
      holds = false;
    settle(r, holds, p_in_range(p));
    return r;
  });
}

Integer nth_root_threshold(const Integer& n, const CriterionConfig& cfg) {
  if (n < 2) throw std::invalid_argument("n must be ≥ 2");
  for (int bits = std::max(cfg.bits, 128); bits <= std::max(cfg.max_bits, 128); bits *= 2) {
    Interval R = nth_root_rhs(n, bits);
    Integer f0 = floor_of(R.lo_rational()), f1 = floor_of(R.hi_rational());
    if (f0 == f1) return f0 + 1;
  }
  throw std::runtime_error("nth_root_threshold: undecided at the maximal precision");
}

// ---------------------------------------------------------------- Mahler bounds

MahlerBoundsReport mahler_upper_bounds(const IntPolynomial& P, int bits) {
  if (P.is_zero()) throw std::invalid_argument("mahler_upper_bounds needs a nonzero polynomial");
  MahlerBoundsReport r;
  r.mahler = mahler_measure(P, bits);
  r.l1 = P.l1_norm();
  r.l2_squared = P.l2_norm_squared();
  r.linf = P.linf_norm();
  r.degree = P.degree();
  const mpfr_prec_t prec = bits;
  Interval l2 = iv(r.l2_squared, prec).sqrt();
  Interval s = (iv(Integer(r.degree + 1), prec)).sqrt() * iv(r.linf, prec);
  r.l2 = to_rational(l2);
  r.sqrt_d1_linf = to_rational(s);
  r.mahler_le_l2 = r.mahler.lo <= r.l2.hi;
  r.l2_le_min = r.l2_squared <= r.l1 * r.l1 && r.l2_squared <= Integer(r.degree + 1) * r.linf * r.linf;
  return r;
}

nlohmann::json MahlerBoundsReport::to_json() const {
  auto ri = [](const RationalInterval& x) {
    return nlohmann::json{{"lo", to_fraction_string(x.lo)}, {"hi", to_fraction_string(x.hi)}, {"approx", static_cast<double>(to_ld(x.lo))}};
  };
  return {{"mahler", ri({mahler.lo, mahler.hi})},
          {"l1", l1.get_str()},
          {"l2", ri(l2)},
          {"linf", linf.get_str()},
          {"sqrt_d1_linf", ri(sqrt_d1_linf)},
          {"degree", degree},
          {"mahler_le_l2", mahler_le_l2},
          {"l2_le_min", l2_le_min},
          {"chain_ok", chain_ok()}};
}

// ---------------------------------------------------------------- Dobrowolski

Interval dobrowolski_lower(const Integer& n, mpfr_prec_t bits) {
  if (n < 3) throw std::invalid_argument("dobrowolski_lower needs n ≥ 3");
  Interval L = iv(n, bits).log2();
  Interval q = L.log2() / L;
  return Interval(Rational(1), bits) + q.pow_ui(3) / Interval(Rational(1200), bits);
}

// ---------------------------------------------------------------- sparse family

EisensteinCheck eisenstein_at_2(const IntPolynomial& Q) {
  EisensteinCheck e;
  e.even_coefficients = true;
  for (const auto& c : Q.coeffs())
    if (c % 2 != 0) e.even_coefficients = false;
  const Integer& a0 = Q.coeff(0);
  e.a0_not_div4 = a0 % 4 != 0;
  return e;
}

namespace {

/// 10^{-37} (log(l1+1) log log(l1+2))^{-3}
Interval sparse_eps(const Integer& l1, mpfr_prec_t prec) {
  Interval L = iv(l1, prec);
  Interval one(Rational(1), prec), two(Rational(2), prec);
  Interval prod = (L + one).log2() * (L + two).log2().log2();
  return Interval(ten_pow(-37), prec) / prod.pow_ui(3);
}

/// ln(l1)/(n − d) vs ln(1 + ε).
std::optional<bool> sparse_holds(const Integer& l1, const Integer& n, int d, mpfr_prec_t prec, Interval* lhs_out = nullptr,
                                 Interval* rhs_out = nullptr) {
  Interval lhs = iv(l1, prec).ln() / iv(Integer(n - d), prec);
  Interval rhs = (Interval(Rational(1), prec) + sparse_eps(l1, prec)).ln();
  if (lhs_out) *lhs_out = lhs;
  if (rhs_out) *rhs_out = rhs;
  if (certainly_less(lhs, rhs)) return true;
  if (!(lhs.lo_rational() < rhs.hi_rational())) return false;
  return std::nullopt;
}

Interval eval_poly(const IntPolynomial& Q, const Interval& x, mpfr_prec_t prec) {
  Interval acc(Rational(0), prec);
  const auto& c = Q.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + iv(c[i], prec);
  return acc;
}

/// Sign of x^n + Q(x) at rational x > 1 (0 if undecided).
int sparse_sign(const IntPolynomial& Q, const Integer& n, const Rational& x, mpfr_prec_t prec) {
  Interval X = iv(x, prec);
  Interval q = eval_poly(Q, X, prec);
  if (!q.certainly_negative()) return q.contains_zero() ? 0 : 1;
  Interval g = iv(n, prec) * X.ln() - (-q).ln();
  if (g.certainly_positive()) return 1;
  if (g.certainly_negative()) return -1;
  return 0;
}

}  // namespace

SparseReport sparse_poly_family(const IntPolynomial& Q, const Integer& n, const Rational& p, const CriterionConfig& cfg) {
  if (Q.is_zero()) throw std::invalid_argument("Q must be nonzero");
  if (Q.eval(1) >= 0) throw std::invalid_argument("sparse family needs Q(1) < 0");
  const int d = Q.degree();
  if (n <= d) throw std::invalid_argument("sparse family needs n > deg Q");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
  SparseReport out;
  out.eisenstein = eisenstein_at_2(Q);
  const Integer l1 = Q.l1_norm();
  out.report = escalate(cfg, [&](mpfr_prec_t prec) {
    CriterionReport r;
    r.criterion = "sparse";
    r.lambda = "1/x0, x0 the root > 1 of x^" + n.get_str() + " + (" + Q.to_string() + ")";
    r.p = p;
    p_note(r);
    Interval lhs(prec), rhs(prec);
    auto holds = sparse_holds(l1, n, d, prec, &lhs, &rhs);
    r.threshold = to_rational(sparse_eps(l1, prec));
    Interval bound = (lhs).exp() - Interval(Rational(1), prec);  // l1^{1/(n−d)} − 1
    char buf[96];
    std::snprintf(buf, sizeof buf, "l1(Q)^(1/(n-d)) - 1 in [%.6Le, %.6Le]", bound.lo_ld(), bound.hi_ld());
    r.notes.push_back(buf);
    if (out.eisenstein.ok())
      r.notes.push_back("Eisenstein at 2: x^n + Q(x) is irreducible");
    else
      r.notes.push_back("Eisenstein conditions at 2 fail: irreducibility not guaranteed, M_λ ≤ M(x^n + Q) still holds");
    if (out.eisenstein.even_coefficients) {
      // Every monic integer factor of x^n + Q reduces to a power of x mod 2.
      r.pm1_status = "NOT_A_UNIT";
      r.notes.push_back("2 | all coefficients of Q: each monic factor of x^n + Q has even constant term, so λ is not a unit");
    } else {
      r.pm1_status = "UNCHECKED";
      r.notes.push_back("Q has an odd coefficient: the non-unit property is not guaranteed");
    }
    settle(r, holds, out.eisenstein.even_coefficients && p_in_range(p));
    return r;
  });

  // Root x0 ∈ (1, B] with B ≥ l1^{1/(n−d)} by bisection on the sign of x^n + Q(x).
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max(out.report.precision_bits, 256));
  Interval Bx = (iv(l1, prec).ln() / iv(Integer(n - d), prec)).exp();
  Rational lo(1), hi = Bx.hi_rational();
  bool ok = sparse_sign(Q, n, hi, prec) >= 0;
  for (int it = 0; ok && it < 200; ++it) {
    Rational mid = (lo + hi) / 2;
    int s = sparse_sign(Q, n, mid, prec);
    if (s == 0) break;
    (s < 0 ? lo : hi) = mid;
    if ((hi - lo) * (1 << 20) < (hi - 1) && it > 60) break;
  }
  if (ok) {
    out.root_enclosure = RationalInterval{lo, hi};
    Interval lam = Interval(Rational(1), prec) / Interval(lo, hi, prec);
    out.report.one_minus_lambda = to_rational(Interval(Rational(1), prec) - lam);
  } else {
    out.report.notes.push_back("root enclosure unavailable: sign at the upper bracket undecided");
  }
  return out;
}

Integer sparse_threshold(const IntPolynomial& Q, const CriterionConfig& cfg) {
  if (Q.eval(1) >= 0) throw std::invalid_argument("sparse family needs Q(1) < 0");
  const int d = Q.degree();
  const Integer l1 = Q.l1_norm();
  auto ok = [&](const Integer& n) {
    for (int bits = std::max(cfg.bits, 256); bits <= std::max(cfg.max_bits, 256); bits *= 2)
      if (auto h = sparse_holds(l1, n, d, bits)) return *h;
    throw std::runtime_error("sparse_threshold: undecided comparison at n = " + n.get_str());
  };
  Integer hi = d + 1;
  while (!ok(hi)) hi *= 2;
  Integer lo = std::max(Integer(d), Integer(hi / 2));
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------- general shape

CriterionReport general_condition(const AlgebraicPtr& lambda, const Rational& p, const Rational& c, const Rational& eps,
                                  const CriterionConfig& cfg) {
  if (!lambda || lambda->compare(0) <= 0 || lambda->compare(1) >= 0) throw std::invalid_argument("λ must lie in (0, 1)");
  if (c <= 0 || eps <= 0) throw std::invalid_argument("c and ε must be positive");
  MahlerEnclosure M = mahler_measure(lambda->minpoly(), std::max(cfg.bits, 128));
  return escalate(cfg, [&](mpfr_prec_t prec) {
    CriterionReport r;
    r.criterion = "general";
    r.lambda = "root of " + lambda->minpoly().to_string();
    r.p = p;
    r.notes.push_back("user-supplied constant c; exploratory only, not a certified criterion");
    r.mahler = RationalInterval{M.lo, M.hi};
    Interval lm = Interval(M.lo, M.hi, prec).log2();
    std::optional<bool> holds;
    if (!lm.certainly_positive()) {
      r.notes.push_back("log M is not certified positive");
    } else {
      // (log M)^{−1−ε} = exp(−(1+ε) ln log M)
      Interval e = (-(Interval(Rational(1), prec) + iv(eps, prec)) * lm.ln()).exp();
      Interval mn(prec);
      if (certainly_less(lm, e))
        mn = lm;
      else if (certainly_less(e, lm))
        mn = e;
      else
        mn = Interval::hull(lm, e);
      Interval T = iv(c, prec) * mn;
      Interval oml = Interval(Rational(1), prec) - lambda->enclosure(prec);
      r.threshold = to_rational(T);
      r.one_minus_lambda = to_rational(oml);
      if (certainly_less(oml, T))
        holds = true;
      else if (certainly_less(T, oml))
        holds = false;
    }
    settle(r, holds, false);
    if (holds && *holds) r.notes.push_back("inequality holds; verdict stays UNKNOWN because c is not certified");
    return r;
  });
}

// ---------------------------------------------------------------- Gaussian gap

namespace {

/// ∫ g_j ln g_j over [−T, T] (natural log), with error estimate.
std::pair<long double, long double> neg_entropy(long double p, long double j, long double T, const QuadratureConfig& cfg,
                                                bool coarse) {
  const long double lp = std::log(p), lq = std::log1p(-p);
  const long double c = 0.5L * std::log(2.0L * 3.14159265358979323846264338327950288L);
  auto f = [&](long double x) {
    long double a = lp - 0.5L * (x + j) * (x + j), b = lq - 0.5L * (x - j) * (x - j);
    long double m = std::max(a, b);
    long double lg = m + std::log(std::exp(a - m) + std::exp(b - m)) - c;
    return std::exp(lg) * lg;
  };
  long double err = 0, val = 0;
  if (coarse)
    val = boost::math::quadrature::gauss_kronrod<long double, 31>::integrate(f, -T, T, cfg.max_depth, cfg.tolerance, &err);
  else
    val = boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(f, -T, T, cfg.max_depth, cfg.tolerance, &err);
  return {val, err};
}

/// Bound on ∫_{|x|>T} |g_j ln g_j| using g_j(x) ≤ g(|x| − j) and |ln g_j| ≤ (|x|+j)²/2 + ln√(2π) + ln(1/min(p,1−p)).
long double tail_bound(long double p, long double j, long double T) {
  const long double a = T - j;  // |x| − j ≥ a
  const long double s2 = std::sqrt(2.0L);
  const long double ga = std::exp(-0.5L * a * a) / std::sqrt(2.0L * 3.14159265358979323846L);
  const long double m0 = 0.5L * std::erfc(a / s2);  // ∫_a^∞ g
  const long double m2 = a * ga + m0;               // ∫_a^∞ y² g
  const long double m1 = ga;                        // ∫_a^∞ y g
  const long double k = 0.5L * std::log(2.0L * 3.14159265358979323846L) + std::log(1.0L / std::min(p, 1 - p));
  // (y + 2j)²/2 = y²/2 + 2jy + 2j² with y = |x| − j.
  return 2.0L * (0.5L * m2 + 2 * j * m1 + (2 * j * j + k) * m0);
}

}  // namespace

EntropyValue gaussian_entropy_gap(const Rational& p, const QuadratureConfig& cfg) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
  const long double pl = to_ld(p);
  const long double r2 = std::sqrt(2.0L);
  const long double T = 12.0L + r2;
  auto [a61, ea] = neg_entropy(pl, 1.0L, T, cfg, false);
  auto [b61, eb] = neg_entropy(pl, r2, T, cfg, false);
  auto [a31, ea3] = neg_entropy(pl, 1.0L, T, cfg, true);
  auto [b31, eb3] = neg_entropy(pl, r2, T, cfg, true);
  (void)ea3;
  (void)eb3;
  const long double ln2 = std::log(2.0L);
  long double value = (a61 - b61) / ln2;
  long double rule_gap = std::fabs((a61 - b61) - (a31 - b31)) / ln2;
  long double tails = (tail_bound(pl, 1.0L, T) + tail_bound(pl, r2, T)) / ln2;
  long double err = (ea + eb) / ln2 + rule_gap + tails + 64 * std::numeric_limits<long double>::epsilon();
  if (!std::isfinite(value) || !std::isfinite(err)) throw std::runtime_error("gaussian_entropy_gap: quadrature failed to converge");
  return {value, err};
}

}  // namespace bc
