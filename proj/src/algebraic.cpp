#include "bc/algebraic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <sstream>

namespace bc {

// ---------------------------------------------------------------- IntPolynomial

IntPolynomial::IntPolynomial(std::vector<Integer> coeffs) : c_(std::move(coeffs)) {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPolynomial IntPolynomial::monomial(const Integer& c, int k) {
  std::vector<Integer> v(static_cast<std::size_t>(k) + 1, Integer(0));
  v[static_cast<std::size_t>(k)] = c;
  return IntPolynomial(std::move(v));
}

Integer IntPolynomial::coeff(int k) const {
  if (k < 0 || k > degree()) return 0;
  return c_[static_cast<std::size_t>(k)];
}

const Integer& IntPolynomial::leading() const {
  if (c_.empty()) throw std::logic_error("leading coefficient of the zero polynomial");
  return c_.back();
}

Integer IntPolynomial::content() const {
  Integer g = 0;
  for (const auto& c : c_) g = gcd(g, c);
  return g;
}

IntPolynomial IntPolynomial::primitive() const {
  if (is_zero()) return *this;
  Integer g = content();
  if (leading() < 0) g = -g;
  std::vector<Integer> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) mpz_divexact(v[i].get_mpz_t(), c_[i].get_mpz_t(), g.get_mpz_t());
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::derivative() const {
  if (c_.size() <= 1) return IntPolynomial();
  std::vector<Integer> v(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<unsigned long>(i);
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::reciprocal() const {
  std::vector<Integer> v(c_.rbegin(), c_.rend());
  return IntPolynomial(std::move(v));
}

Rational IntPolynomial::eval(const Rational& x) const {
  // Horner on numerator/denominator separately: Σ c_k n^k d^{deg−k}.
  if (c_.empty()) return 0;
  const Integer& n = x.get_num();
  const Integer& d = x.get_den();
  Integer acc = c_.back();
  Integer dpow = 1;
  for (std::size_t i = c_.size() - 1; i-- > 0;) {
    acc *= n;
    dpow *= d;
    acc += c_[i] * dpow;
  }
  Rational r(acc, dpow);
  r.canonicalize();
  return r;
}

Integer IntPolynomial::l1_norm() const {
  Integer s = 0;
  for (const auto& c : c_) s += abs(c);
  return s;
}

Integer IntPolynomial::l2_norm_squared() const {
  Integer s = 0;
  for (const auto& c : c_) s += c * c;
  return s;
}

Integer IntPolynomial::linf_norm() const {
  Integer s = 0;
  for (const auto& c : c_)
    if (abs(c) > s) s = abs(c);
  return s;
}

std::string IntPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Integer& c = c_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    Integer a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0 || a != 1) os << a.get_str();
    if (k >= 1) os << "x";
    if (k >= 2) os << "^" << k;
  }
  return os.str();
}

std::string IntPolynomial::to_list_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ",";
    s += c_[i].get_str();
  }
  return s + "]";
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return IntPolynomial();
  std::vector<Integer> v(a.c_.size() + b.c_.size() - 1, Integer(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<Integer> v(std::max(a.c_.size(), b.c_.size()), Integer(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<Integer> v(std::max(a.c_.size(), b.c_.size()), Integer(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] -= b.c_[i];
  return IntPolynomial(std::move(v));
}

// ---------------------------------------------------------------- parsing

IntPolynomial parse_polynomial_verbatim(const std::string& text) {
  std::string s;
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x88 &&
        static_cast<unsigned char>(text[i + 2]) == 0x92) {
      s.push_back('-');
      i += 2;
    } else if (!std::isspace(c)) {
      s.push_back(static_cast<char>(c));
    }
  }
  if (s.empty()) throw std::invalid_argument("empty polynomial");

  std::vector<Integer> coeffs;
  if (s.front() == '[') {
    if (s.back() != ']') throw std::invalid_argument("unterminated coefficient list: " + text);
    std::string body = s.substr(1, s.size() - 2);
    std::size_t start = 0;
    while (start <= body.size()) {
      auto comma = body.find(',', start);
      std::string item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (item.empty()) throw std::invalid_argument("empty coefficient in: " + text);
      coeffs.push_back(parse_integer(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else {
    std::size_t i = 0;
    auto add = [&](int k, const Integer& c) {
      if (static_cast<int>(coeffs.size()) <= k) coeffs.resize(static_cast<std::size_t>(k) + 1, Integer(0));
      coeffs[static_cast<std::size_t>(k)] += c;
    };
    bool any = false;
    while (i < s.size()) {
      int sgn_ = 1;
      if (s[i] == '+' || s[i] == '-') {
        if (s[i] == '-') sgn_ = -1;
        ++i;
      } else if (any) {
        throw std::invalid_argument("expected '+' or '-' in: " + text);
      }
      std::size_t d0 = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      Integer c = 1;
      bool has_num = i > d0;
      if (has_num) c = Integer(s.substr(d0, i - d0));
      if (i < s.size() && s[i] == '*') {
        if (!has_num) throw std::invalid_argument("dangling '*' in: " + text);
        ++i;
      }
      int k = 0;
      if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
        ++i;
        k = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          std::size_t e0 = i;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
          if (i == e0) throw std::invalid_argument("missing exponent in: " + text);
          k = std::stoi(s.substr(e0, i - e0));
        }
      } else if (!has_num) {
        throw std::invalid_argument("syntax error in polynomial: " + text);
      }
      add(k, sgn_ * c);
      any = true;
    }
  }
  IntPolynomial p(std::move(coeffs));
  if (p.is_zero()) throw std::invalid_argument("zero polynomial");
  return p;
}

IntPolynomial parse_polynomial(const std::string& text) {
  IntPolynomial p = parse_polynomial_verbatim(text);
  if (p.degree() < 1) throw std::invalid_argument("polynomial of degree 0");
  return p.primitive();
}

// ---------------------------------------------------------------- Q[x] helpers

namespace {

using QPoly = std::vector<Rational>;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly to_q(const IntPolynomial& p) {
  QPoly q;
  q.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) q.emplace_back(c);
  return q;
}

IntPolynomial q_to_primitive(const QPoly& q) {
  Integer l = 1;
  for (const auto& c : q) l = lcm(l, c.get_den());
  std::vector<Integer> v;
  v.reserve(q.size());
  for (const auto& c : q) {
    Rational t = c * l;
    v.push_back(t.get_num());
  }
  return IntPolynomial(std::move(v)).primitive();
}

QPoly q_rem(QPoly a, const QPoly& b) {
  trim(a);
  if (b.empty()) throw std::domain_error("division by zero polynomial");
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

QPoly q_div(QPoly a, const QPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  if (a.size() < b.size()) return {};
  QPoly quo(a.size() - db, Rational(0));
  while (a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - 1 - db;
    quo[shift] = f;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  if (!a.empty()) throw std::logic_error("inexact polynomial division");
  return quo;
}

QPoly q_monic(QPoly p) {
  trim(p);
  if (p.empty()) return p;
  Rational l = p.back();
  for (auto& c : p) c /= l;
  return p;
}

QPoly q_gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = q_rem(a, b);
    a = std::move(b);
    b = q_monic(std::move(r));
  }
  return q_monic(a);
}

QPoly q_deriv(const QPoly& p) {
  QPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<unsigned long>(i));
  trim(d);
  return d;
}

QPoly q_sub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  trim(r);
  return r;
}

// Rescales by a positive rational so the sign pattern is preserved.
IntPolynomial positive_normalize(const QPoly& q) {
  Integer l = 1;
  for (const auto& c : q) l = lcm(l, c.get_den());
  std::vector<Integer> v;
  for (const auto& c : q) v.push_back(Rational(c * l).get_num());
  IntPolynomial p(std::move(v));
  Integer g = p.content();
  if (g == 0) return p;
  std::vector<Integer> w(p.coeffs().size());
  for (std::size_t i = 0; i < w.size(); ++i) mpz_divexact(w[i].get_mpz_t(), p.coeffs()[i].get_mpz_t(), g.get_mpz_t());
  return IntPolynomial(std::move(w));
}

struct SturmSequence {
  std::vector<IntPolynomial> seq;

  explicit SturmSequence(const IntPolynomial& p) {
    seq.push_back(p);
    IntPolynomial d = p.derivative();
    if (d.is_zero()) return;
    seq.push_back(positive_normalize(to_q(d)));
    while (true) {
      QPoly r = q_rem(to_q(seq[seq.size() - 2]), to_q(seq.back()));
      if (r.empty()) break;
      for (auto& c : r) c = -c;
      seq.push_back(positive_normalize(r));
    }
  }

  int variations(const Rational& x) const {
    int v = 0, last = 0;
    for (const auto& p : seq) {
      int s = p.sign_at(x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  }

  // (a, b]
  int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }
};

}  // namespace

IntPolynomial poly_gcd(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() && b.is_zero()) return IntPolynomial();
  QPoly g = q_gcd(to_q(a), to_q(b));
  return q_to_primitive(g);
}

IntPolynomial poly_exact_div(const IntPolynomial& a, const IntPolynomial& b) {
  QPoly q = q_div(to_q(a), to_q(b));
  std::vector<Integer> v;
  for (const auto& c : q) {
    if (c.get_den() != 1) throw std::logic_error("quotient not integral");
    v.push_back(c.get_num());
  }
  return IntPolynomial(std::move(v));
}

std::vector<Rational> poly_rem_rational(const std::vector<Rational>& a, const IntPolynomial& b) {
  return q_rem(a, to_q(b));
}

IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.degree() < 1) return p.primitive();
  QPoly q = to_q(p);
  QPoly g = q_gcd(q, q_deriv(q));
  return q_to_primitive(q_div(q, g));
}

std::vector<std::pair<IntPolynomial, int>> squarefree_factorization(const IntPolynomial& p) {
  std::vector<std::pair<IntPolynomial, int>> out;
  if (p.degree() < 1) return out;
  QPoly a = q_monic(to_q(p));
  QPoly ap = q_deriv(a);
  QPoly b = q_gcd(a, ap);
  QPoly c = q_div(a, b);
  QPoly d = q_sub(q_div(ap, b), q_deriv(c));
  int i = 1;
  while (c.size() > 1) {
    QPoly g = q_gcd(c, d);
    if (g.size() > 1) out.emplace_back(q_to_primitive(g), i);
    c = q_div(c, g);
    d = q_sub(q_div(d, g), q_deriv(c));
    ++i;
  }
  return out;
}

int sturm_count(const IntPolynomial& squarefree, const Rational& a, const Rational& b) {
  return SturmSequence(squarefree).count(a, b);
}

// ---------------------------------------------------------------- AlgebraicNumber

AlgebraicNumber::AlgebraicNumber(const IntPolynomial& poly, const Rational& lo, const Rational& hi)
    : lo_(lo), hi_(hi) {
  if (poly.degree() < 1) throw std::invalid_argument("AlgebraicNumber needs a polynomial of degree ≥ 1");
  if (lo > hi) throw std::invalid_argument("AlgebraicNumber: lo > hi");
  poly_ = squarefree_part(poly);

  auto set_exact = [&](const Rational& v) {
    exact_ = v;
    poly_ = IntPolynomial({-v.get_num(), v.get_den()}).primitive();
    if (lo_ == hi_) {
      lo_ = v - 1;
      hi_ = v + 1;
    }
  };

  if (poly_.degree() == 1) {
    Rational v(-poly_.coeff(0), poly_.coeff(1));
    v.canonicalize();
    if (v < lo || v > hi) throw std::invalid_argument("interval does not contain the root");
    set_exact(v);
    return;
  }
  SturmSequence ss(poly_);
  int n = ss.count(lo, hi) + (poly_.sign_at(lo) == 0 ? 1 : 0);
  if (n != 1)
    throw std::invalid_argument("interval contains " + std::to_string(n) + " roots, expected exactly one");
  if (poly_.sign_at(lo) == 0) {
    set_exact(lo);
    return;
  }
  if (poly_.sign_at(hi) == 0) {
    set_exact(hi);
    return;
  }
  if (lo == hi) throw std::invalid_argument("degenerate interval at a non-root");
  // A rational root p/q of a primitive polynomial has q | lc, so after
  // refining below 1/(4|lc|) only one candidate k/lc can remain.
  Integer lc = abs(poly_.leading());
  int bits = static_cast<int>(mpz_sizeinbase(lc.get_mpz_t(), 2)) + 3;
  RationalInterval r = refine(bits);
  for (const Rational& end : {r.lo, r.hi}) {
    Rational scaled = end * lc;
    Integer k;
    mpz_fdiv_q(k.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    for (const Integer& kk : {k, Integer(k + 1)}) {
      Rational cand(kk, lc);
      cand.canonicalize();
      if (cand >= r.lo && cand <= r.hi && poly_.sign_at(cand) == 0) {
        std::unique_lock lock(mu_);
        cache_.clear();
        set_exact(cand);
        return;
      }
    }
  }
}

AlgebraicPtr AlgebraicNumber::make(const IntPolynomial& poly, const Rational& lo, const Rational& hi) {
  return std::make_shared<const AlgebraicNumber>(poly, lo, hi);
}

AlgebraicPtr AlgebraicNumber::from_rational(const Rational& q) {
  IntPolynomial p({-q.get_num(), q.get_den()});
  return make(p, q - 1, q + 1);
}

std::size_t AlgebraicNumber::cached_entries() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

RationalInterval AlgebraicNumber::refine(int bits) const {
  if (bits < 1) throw std::invalid_argument("refine: bits must be ≥ 1");
  if (exact_) return {*exact_, *exact_};
  {
    std::shared_lock lock(mu_);
    auto it = cache_.lower_bound(bits);
    if (it != cache_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto it = cache_.lower_bound(bits);
  if (it != cache_.end()) return it->second;
  RationalInterval cur{lo_, hi_};
  if (it != cache_.begin()) cur = std::prev(it)->second;
  Rational target(Integer(1), pow_int(Integer(2), static_cast<unsigned long>(bits)));
  int s_lo = poly_.sign_at(cur.lo);
  while (cur.width() > target) {
    Rational mid = (cur.lo + cur.hi) / 2;
    int s = poly_.sign_at(mid);
    ++work_;
    if (s == 0) {
      cur = {mid, mid};
      break;
    }
    if (s == s_lo)
      cur.lo = mid;
    else
      cur.hi = mid;
  }
  cache_[bits] = cur;
  return cur;
}

Interval AlgebraicNumber::enclosure(mpfr_prec_t prec) const {
  RationalInterval r = refine(static_cast<int>(prec) + 4);
  return Interval(r.lo, r.hi, prec + 8);
}

int AlgebraicNumber::compare(const Rational& q) const {
  if (exact_) return sgn(*exact_ - q);
  if (q < lo_) return 1;
  if (q > hi_) return -1;
  int sq = poly_.sign_at(q);
  if (sq == 0) return 0;
  int slo = poly_.sign_at(lo_);
  if (slo == 0) return sgn(lo_ - q);
  // Exactly one simple root in [lo, hi]: the sign flips only across it.
  return sq == slo ? 1 : -1;
}

bool AlgebraicNumber::same_number(const AlgebraicNumber& o) const {
  if (this == &o) return true;
  if (!(poly_ == o.poly_)) return false;
  if (exact_ || o.exact_) return exact_ && o.exact_ && *exact_ == *o.exact_;
  Rational lo = std::max(lo_, o.lo_), hi = std::min(hi_, o.hi_);
  if (lo > hi) return false;
  return sturm_count(poly_, lo, hi) + (poly_.sign_at(lo) == 0 ? 1 : 0) >= 1;
}

std::vector<Rational> AlgebraicNumber::reduce(const std::vector<Rational>& coeffs) const {
  std::vector<Rational> r = poly_rem_rational(coeffs, poly_);
  r.resize(static_cast<std::size_t>(degree()), Rational(0));
  return r;
}

std::vector<Rational> AlgebraicNumber::power_coeffs(int n) const {
  if (n < 0) throw std::invalid_argument("negative power");
  {
    std::shared_lock lock(mu_);
    if (static_cast<std::size_t>(n) < powers_.size()) return powers_[static_cast<std::size_t>(n)];
  }
  std::unique_lock lock(mu_);
  const std::size_t m = static_cast<std::size_t>(degree());
  if (powers_.empty()) {
    std::vector<Rational> one(m, Rational(0));
    one[0] = 1;
    powers_.push_back(std::move(one));
  }
  while (powers_.size() <= static_cast<std::size_t>(n)) {
    const auto& prev = powers_.back();
    std::vector<Rational> next(m, Rational(0));
    Rational top = prev[m - 1];
    for (std::size_t j = m - 1; j >= 1; --j) next[j] = prev[j - 1];
    if (m >= 1) next[0] = 0;
    if (m == 1) next[0] = 0;
    if (top != 0) {
      Rational f = top / Rational(poly_.leading());
      for (std::size_t j = 0; j < m; ++j) next[j] -= f * Rational(poly_.coeff(static_cast<int>(j)));
    }
    powers_.push_back(std::move(next));
  }
  return powers_[static_cast<std::size_t>(n)];
}

Interval AlgebraicNumber::evaluate(const std::vector<Rational>& coeffs, mpfr_prec_t prec) const {
  Interval lam = enclosure(prec);
  Interval acc(Rational(0), prec + 8);
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * lam + Interval(coeffs[j], prec + 8);
  return acc;
}

int AlgebraicNumber::sign_of(const std::vector<Rational>& coeffs) const {
  std::vector<Rational> r = reduce(coeffs);
  bool rational = true;
  for (std::size_t j = 1; j < r.size(); ++j)
    if (r[j] != 0) rational = false;
  if (rational) return sgn(r[0]);
  for (mpfr_prec_t prec = 64; prec <= (1 << 16); prec *= 2) {
    Interval v = evaluate(r, prec);
    if (v.certainly_positive()) return 1;
    if (v.certainly_negative()) return -1;
  }
  throw std::runtime_error("sign_of: undecided (is the minimal polynomial irreducible?)");
}

// ---------------------------------------------------------------- isolation

std::vector<AlgebraicPtr> isolate_real_roots(const IntPolynomial& p, const Rational& lo, const Rational& hi) {
  if (p.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
  std::vector<AlgebraicPtr> out;
  if (p.degree() < 1 || lo > hi) return out;
  IntPolynomial s = squarefree_part(p);
  SturmSequence ss(s);
  if (s.sign_at(lo) == 0) out.push_back(AlgebraicNumber::from_rational(lo));
  struct Job {
    Rational a, b;
    int n;
  };
  std::vector<Job> stack{{lo, hi, ss.count(lo, hi)}};
  std::vector<AlgebraicPtr> found;
  while (!stack.empty()) {
    Job j = stack.back();
    stack.pop_back();
    if (j.n == 0) continue;
    if (j.n == 1) {
      if (s.sign_at(j.b) == 0)
        found.push_back(AlgebraicNumber::from_rational(j.b));
      else
        found.push_back(AlgebraicNumber::make(s, j.a, j.b));
      continue;
    }
    Rational w = j.b - j.a;
    Rational m = j.a + w / 2;
    for (unsigned k = 3; s.sign_at(m) == 0; ++k) m = j.a + w / 2 + w / Rational(pow_int(Integer(2), k));
    int left = ss.count(j.a, m);
    stack.push_back({m, j.b, j.n - left});
    stack.push_back({j.a, m, left});
  }
  std::sort(found.begin(), found.end(),
            [](const AlgebraicPtr& x, const AlgebraicPtr& y) { return x->isolating_interval().lo < y->isolating_interval().lo; });
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

// ---------------------------------------------------------------- complex roots

namespace {

// Minimal complex number over MPFR (round-to-nearest) for Aberth iterations.
struct MpC {
  mpfr_t re, im;
  explicit MpC(mpfr_prec_t p) {
    mpfr_init2(re, p);
    mpfr_init2(im, p);
    mpfr_set_zero(re, 1);
    mpfr_set_zero(im, 1);
  }
  MpC(const MpC& o) {
    mpfr_init2(re, mpfr_get_prec(o.re));
    mpfr_init2(im, mpfr_get_prec(o.im));
    mpfr_set(re, o.re, MPFR_RNDN);
    mpfr_set(im, o.im, MPFR_RNDN);
  }
  MpC& operator=(const MpC& o) {
    if (this != &o) {
      mpfr_set_prec(re, mpfr_get_prec(o.re));
      mpfr_set_prec(im, mpfr_get_prec(o.im));
      mpfr_set(re, o.re, MPFR_RNDN);
      mpfr_set(im, o.im, MPFR_RNDN);
    }
    return *this;
  }
  ~MpC() {
    mpfr_clear(re);
    mpfr_clear(im);
  }
  void set_prec_keep(mpfr_prec_t p) {
    mpfr_prec_round(re, p, MPFR_RNDN);
    mpfr_prec_round(im, p, MPFR_RNDN);
  }
};

struct CScratch {
  mpfr_t a, b, c, d;
  explicit CScratch(mpfr_prec_t p) {
    mpfr_inits2(p, a, b, c, d, static_cast<mpfr_ptr>(nullptr));
  }
  ~CScratch() { mpfr_clears(a, b, c, d, static_cast<mpfr_ptr>(nullptr)); }
};

void c_mul(MpC& r, const MpC& x, const MpC& y, CScratch& t) {
  mpfr_mul(t.a, x.re, y.re, MPFR_RNDN);
  mpfr_mul(t.b, x.im, y.im, MPFR_RNDN);
  mpfr_mul(t.c, x.re, y.im, MPFR_RNDN);
  mpfr_mul(t.d, x.im, y.re, MPFR_RNDN);
  mpfr_sub(r.re, t.a, t.b, MPFR_RNDN);
  mpfr_add(r.im, t.c, t.d, MPFR_RNDN);
}

void c_div(MpC& r, const MpC& x, const MpC& y, CScratch& t) {
  // (x.re + i x.im)/(y.re + i y.im)
  mpfr_sqr(t.a, y.re, MPFR_RNDN);
  mpfr_sqr(t.b, y.im, MPFR_RNDN);
  mpfr_add(t.a, t.a, t.b, MPFR_RNDN);  // |y|^2
  mpfr_mul(t.b, x.re, y.re, MPFR_RNDN);
  mpfr_mul(t.c, x.im, y.im, MPFR_RNDN);
  mpfr_add(t.b, t.b, t.c, MPFR_RNDN);
  mpfr_mul(t.c, x.im, y.re, MPFR_RNDN);
  mpfr_mul(t.d, x.re, y.im, MPFR_RNDN);
  mpfr_sub(t.c, t.c, t.d, MPFR_RNDN);
  mpfr_div(r.re, t.b, t.a, MPFR_RNDN);
  mpfr_div(r.im, t.c, t.a, MPFR_RNDN);
}

void c_abs(mpfr_t r, const MpC& x) { mpfr_hypot(r, x.re, x.im, MPFR_RNDN); }

// Aberth–Ehrlich simultaneous iteration; z holds the starting points.
void aberth(const IntPolynomial& p, std::vector<MpC>& z, mpfr_prec_t prec) {
  const int d = p.degree();
  for (auto& zi : z) zi.set_prec_keep(prec);
  std::vector<mpfr_t> cf(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) {
    mpfr_init2(cf[static_cast<std::size_t>(k)], prec);
    mpfr_set_z(cf[static_cast<std::size_t>(k)], p.coeffs()[static_cast<std::size_t>(k)].get_mpz_t(), MPFR_RNDN);
  }
  CScratch t(prec);
  MpC pv(prec), dv(prec), tmp(prec), n(prec), s(prec), w(prec), one(prec);
  mpfr_set_ui(one.re, 1, MPFR_RNDN);
  mpfr_t step, mag, tol;
  mpfr_inits2(prec, step, mag, tol, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui_2exp(tol, 1, -(static_cast<long>(prec) - 12), MPFR_RNDN);
  const int max_iter = 400 + 20 * d;
  int quiet_rounds = 0;
  for (int it = 0; it < max_iter; ++it) {
    bool small = true;
    for (int i = 0; i < d; ++i) {
      MpC& zi = z[static_cast<std::size_t>(i)];
      mpfr_set(pv.re, cf[static_cast<std::size_t>(d)], MPFR_RNDN);
      mpfr_set_zero(pv.im, 1);
      mpfr_set_zero(dv.re, 1);
      mpfr_set_zero(dv.im, 1);
      for (int k = d - 1; k >= 0; --k) {
        c_mul(tmp, dv, zi, t);
        mpfr_add(dv.re, tmp.re, pv.re, MPFR_RNDN);
        mpfr_set(dv.im, tmp.im, MPFR_RNDN);
        mpfr_add(dv.im, dv.im, pv.im, MPFR_RNDN);
        c_mul(tmp, pv, zi, t);
        mpfr_add(pv.re, tmp.re, cf[static_cast<std::size_t>(k)], MPFR_RNDN);
        mpfr_set(pv.im, tmp.im, MPFR_RNDN);
      }
      if (mpfr_zero_p(pv.re) && mpfr_zero_p(pv.im)) continue;
      if (mpfr_zero_p(dv.re) && mpfr_zero_p(dv.im)) {
        // Nudge off a critical point.
        mpfr_add_d(zi.re, zi.re, 1e-3, MPFR_RNDN);
        small = false;
        continue;
      }
      c_div(n, pv, dv, t);
      mpfr_set_zero(s.re, 1);
      mpfr_set_zero(s.im, 1);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        mpfr_sub(tmp.re, zi.re, z[static_cast<std::size_t>(j)].re, MPFR_RNDN);
        mpfr_sub(tmp.im, zi.im, z[static_cast<std::size_t>(j)].im, MPFR_RNDN);
        if (mpfr_zero_p(tmp.re) && mpfr_zero_p(tmp.im)) continue;
        c_div(w, one, tmp, t);
        mpfr_add(s.re, s.re, w.re, MPFR_RNDN);
        mpfr_add(s.im, s.im, w.im, MPFR_RNDN);
      }
      c_mul(tmp, n, s, t);
      mpfr_ui_sub(tmp.re, 1, tmp.re, MPFR_RNDN);
      mpfr_neg(tmp.im, tmp.im, MPFR_RNDN);
      c_div(w, n, tmp, t);
      mpfr_sub(zi.re, zi.re, w.re, MPFR_RNDN);
      mpfr_sub(zi.im, zi.im, w.im, MPFR_RNDN);
      c_abs(step, w);
      c_abs(mag, zi);
      if (mpfr_cmp_ui(mag, 1) < 0) mpfr_set_ui(mag, 1, MPFR_RNDN);
      mpfr_mul(mag, mag, tol, MPFR_RNDN);
      if (mpfr_cmp(step, mag) > 0) small = false;
    }
    if (small) {
      if (++quiet_rounds >= 2) break;
    } else {
      quiet_rounds = 0;
    }
  }
  mpfr_clears(step, mag, tol, static_cast<mpfr_ptr>(nullptr));
  for (auto& c : cf) mpfr_clear(c);
}

std::vector<MpC> initial_points(const IntPolynomial& p, mpfr_prec_t prec) {
  const int d = p.degree();
  // Radius: geometric mean of root moduli, |c0/cd|^{1/d} (or 1 when c0 = 0).
  long double logr = 0.0L;
  if (p.coeff(0) != 0) logr = (log2_ld(Rational(abs(p.coeff(0)))) - log2_ld(Rational(abs(p.leading())))) / d;
  std::vector<MpC> z;
  for (int k = 0; k < d; ++k) {
    MpC c(prec);
    long double ang = 2.0L * M_PIl * k / d + 0.4L;
    long double rr = std::exp2(logr) * (1.0L + 0.01L * k / d);
    mpfr_set_ld(c.re, rr * std::cos(ang), MPFR_RNDN);
    mpfr_set_ld(c.im, rr * std::sin(ang), MPFR_RNDN);
    z.push_back(c);
  }
  return z;
}

struct CInt {
  Interval re, im;
};

CInt ci_mul(const CInt& x, const CInt& y) { return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re}; }

// Upper bound of |x| for a complex interval.
Interval ci_abs(const CInt& x) { return (x.re.sqr() + x.im.sqr()).sqrt(); }

struct Certified {
  bool ok = false;
  std::vector<Interval> modulus;  // enclosure of |root_i|
};

// Smith's inclusion theorem: with Weierstrass corrections W_i, the discs
// D(z_i, d·|W_i|) cover all roots and each connected component holds as many
// roots as discs; pairwise disjoint discs therefore isolate every root.
Certified certify(const IntPolynomial& p, const std::vector<MpC>& z, mpfr_prec_t prec) {
  const int d = p.degree();
  const mpfr_prec_t ip = prec + 16;
  Certified out;
  std::vector<CInt> pts;
  for (const auto& zi : z) pts.push_back({Interval::from_mpfr(zi.re, ip), Interval::from_mpfr(zi.im, ip)});
  std::vector<Interval> radius;
  Interval lc = Interval(Rational(abs(p.leading())), ip);
  for (int i = 0; i < d; ++i) {
    const CInt& zi = pts[static_cast<std::size_t>(i)];
    CInt acc{Interval(Rational(p.leading()), ip), Interval(Rational(0), ip)};
    for (int k = d - 1; k >= 0; --k) {
      acc = ci_mul(acc, zi);
      acc.re = acc.re + Interval(Rational(p.coeff(k)), ip);
    }
    Interval num = ci_abs(acc);
    Interval den = lc;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      CInt diff{zi.re - pts[static_cast<std::size_t>(j)].re, zi.im - pts[static_cast<std::size_t>(j)].im};
      Interval m = ci_abs(diff);
      if (!m.certainly_positive()) return out;
      den = den * m;
    }
    Interval r = Interval::from_long(d, ip) * num / den;
    Interval rr(ip);
    mpfr_set(rr.lo(), r.hi(), MPFR_RNDU);
    mpfr_set(rr.hi(), r.hi(), MPFR_RNDU);
    radius.push_back(rr);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const CInt& a = pts[static_cast<std::size_t>(i)];
      const CInt& b = pts[static_cast<std::size_t>(j)];
      Interval dist = ci_abs(CInt{a.re - b.re, a.im - b.im});
      Interval rs = radius[static_cast<std::size_t>(i)] + radius[static_cast<std::size_t>(j)];
      if (!certainly_less(rs, dist)) return out;
    }
  for (int i = 0; i < d; ++i) {
    Interval m = ci_abs(pts[static_cast<std::size_t>(i)]);
    Interval r = radius[static_cast<std::size_t>(i)];
    Interval enc(ip);
    mpfr_sub(enc.lo(), m.lo(), r.hi(), MPFR_RNDD);
    if (mpfr_sgn(enc.lo()) < 0) mpfr_set_zero(enc.lo(), 1);
    mpfr_add(enc.hi(), m.hi(), r.hi(), MPFR_RNDU);
    out.modulus.push_back(enc);
  }
  out.ok = true;
  return out;
}

// Roots on the unit circle of a square-free polynomial, via the self-reciprocal
// part g = gcd(s, s*) and the substitution y = x + 1/x.
int circle_count_squarefree(const IntPolynomial& s) {
  IntPolynomial g = poly_gcd(s, s.reciprocal());
  int count = 0;
  if (g.degree() < 1) return 0;
  for (int sgn_ : {1, -1}) {
    IntPolynomial lin({Integer(-sgn_), Integer(1)});  // x − 1, then x + 1
    if (g.degree() >= 1 && g.sign_at(Rational(sgn_)) == 0) {
      g = poly_exact_div(g, lin);
      ++count;
    }
  }
  if (g.degree() < 1) return count;
  if (g.degree() % 2 != 0) throw std::logic_error("self-reciprocal factor of odd degree after removing ±1");
  const int n = g.degree() / 2;
  // Dickson polynomials D_k(y) = x^k + x^{-k} for y = x + 1/x.
  std::vector<IntPolynomial> D;
  D.push_back(IntPolynomial({Integer(2)}));
  D.push_back(IntPolynomial({Integer(0), Integer(1)}));
  IntPolynomial y({Integer(0), Integer(1)});
  for (int k = 2; k <= n; ++k) D.push_back(y * D[static_cast<std::size_t>(k - 1)] - D[static_cast<std::size_t>(k - 2)]);
  IntPolynomial T({g.coeff(n)});
  for (int k = 1; k <= n; ++k) T = T + IntPolynomial({g.coeff(n + k)}) * D[static_cast<std::size_t>(k)];
  IntPolynomial Ts = squarefree_part(T);
  // Roots y in (−2, 2) ↔ conjugate pairs on the circle; T(±2) ≠ 0 since ±1 were removed.
  int inside = sturm_count(Ts, Rational(-2), Rational(2));
  return count + 2 * inside;
}

struct FactorAnalysis {
  int inside = 0, on = 0, outside = 0;
  Rational mlo, mhi;
};

FactorAnalysis analyze_squarefree(const IntPolynomial& s, int target_bits) {
  FactorAnalysis fa;
  if (s.degree() == 1) {
    Integer a = abs(s.coeff(1)), b = abs(s.coeff(0));
    if (b > a)
      fa.outside = 1;
    else if (b == a)
      fa.on = 1;
    else
      fa.inside = 1;
    fa.mlo = fa.mhi = Rational(std::max(a, b));
    return fa;
  }
  const int d = s.degree();
  const int u = circle_count_squarefree(s);
  mpfr_prec_t prec = target_bits + 40 + 4 * d;
  std::vector<MpC> z = initial_points(s, prec);
  const mpfr_prec_t limit = std::max<mpfr_prec_t>(1 << 14, 64 * static_cast<mpfr_prec_t>(target_bits));
  Rational target_ratio = 1 + Rational(Integer(1), pow_int(Integer(2), static_cast<unsigned long>(target_bits)));
  for (; prec <= limit; prec *= 2) {
    aberth(s, z, prec);
    Certified c = certify(s, z, prec);
    if (!c.ok) continue;
    int in = 0, on = 0, out = 0;
    const mpfr_prec_t ip = prec + 16;
    Interval prod = Interval(Rational(abs(s.leading())), ip);
    for (const auto& m : c.modulus) {
      if (mpfr_cmp_ui(m.lo(), 1) > 0) {
        ++out;
        prod = prod * m;
      } else if (mpfr_cmp_ui(m.hi(), 1) < 0) {
        ++in;
      } else {
        ++on;
      }
    }
    if (on != u) continue;
    Rational lo = prod.lo_rational(), hi = prod.hi_rational();
    if (lo < 1) lo = 1;
    if (hi > lo * target_ratio) continue;
    fa.inside = in;
    fa.on = on;
    fa.outside = out;
    fa.mlo = lo;
    fa.mhi = hi;
    return fa;
  }
  throw MahlerUnknown("root moduli could not be separated from 1 within the precision limit");
}

}  // namespace

MahlerEnclosure mahler_measure(const IntPolynomial& p, int bits) {
  if (p.is_zero() || p.degree() < 1) throw std::invalid_argument("mahler_measure needs degree ≥ 1");
  if (bits < 2) throw std::invalid_argument("mahler_measure: bits must be ≥ 2");
  auto factors = squarefree_factorization(p);
  int total_mult = 0;
  for (auto& [f, m] : factors) total_mult += m * f.degree();
  int extra = 4;
  while ((1 << extra) < 4 * total_mult) ++extra;
  Rational c = abs(p.content());
  Rational lo = c, hi = c;
  for (auto& [f, m] : factors) {
    FactorAnalysis fa = analyze_squarefree(f, bits + extra);
    for (int k = 0; k < m; ++k) {
      lo *= fa.mlo;
      hi *= fa.mhi;
    }
  }
  if (lo < 1) lo = 1;
  MahlerEnclosure e{lo, hi, bits};
  Rational bound = lo * (1 + Rational(Integer(1), pow_int(Integer(2), static_cast<unsigned long>(bits - 1))));
  if (hi > bound) throw MahlerUnknown("enclosure width contract not met");
  return e;
}

int unit_circle_root_count(const IntPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("unit_circle_root_count: zero polynomial");
  int total = 0;
  for (auto& [f, m] : squarefree_factorization(p)) {
    if (f.degree() == 1)
      total += (abs(f.coeff(0)) == abs(f.coeff(1))) ? m : 0;
    else
      total += m * circle_count_squarefree(f);
  }
  return total;
}

RootCensus root_census(const IntPolynomial& p) {
  RootCensus rc;
  for (auto& [f, m] : squarefree_factorization(p)) {
    FactorAnalysis fa = analyze_squarefree(f, 32);
    rc.inside += m * fa.inside;
    rc.on += m * fa.on;
    rc.outside += m * fa.outside;
  }
  return rc;
}

// ---------------------------------------------------------------- pm1 search

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
u64 addmod(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}
u64 zmod(const Integer& z, u64 p) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), Integer(std::to_string(p)).get_mpz_t());
  return static_cast<u64>(mpz_get_ui(r.get_mpz_t()));
}

// Fingerprints f_i ≡ <λ^i mod (minpoly, p), w> for i < D.
std::vector<u64> fingerprints(const IntPolynomial& P, int D, u64 p, u64 salt) {
  const int m = P.degree();
  std::vector<u64> c(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) c[static_cast<std::size_t>(j)] = zmod(P.coeff(j), p);
  u64 inv_lc = powmod(c[static_cast<std::size_t>(m)], p - 2, p);
  std::vector<u64> w(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) w[static_cast<std::size_t>(j)] = mix_seed(salt, static_cast<u64>(j)) % p;
  std::vector<u64> v(static_cast<std::size_t>(m), 0);
  v[0] = 1;
  std::vector<u64> out;
  for (int i = 0; i < D; ++i) {
    u64 f = 0;
    for (int j = 0; j < m; ++j) f = addmod(f, mulmod(v[static_cast<std::size_t>(j)], w[static_cast<std::size_t>(j)], p), p);
    out.push_back(f);
    u64 top = v[static_cast<std::size_t>(m - 1)];
    for (int j = m - 1; j >= 1; --j) v[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j - 1)];
    v[0] = 0;
    if (top) {
      u64 t = mulmod(top, inv_lc, p);
      for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = submod(v[static_cast<std::size_t>(j)], mulmod(t, c[static_cast<std::size_t>(j)], p), p);
    }
  }
  return out;
}

u64 pick_prime(const Integer& avoid, u64 start) {
  Integer z(std::to_string(start));
  for (;;) {
    mpz_nextprime(z.get_mpz_t(), z.get_mpz_t());
    if (avoid % z != 0) return static_cast<u64>(mpz_get_ui(z.get_mpz_t()));
  }
}

}  // namespace

Pm1Result pm1_root_search(const AlgebraicNumber& x, int degree_bound, const Pm1Config& cfg) {
  if (degree_bound > cfg.max_degree_bound)
    throw std::invalid_argument("degree_bound exceeds the configured maximum of " + std::to_string(cfg.max_degree_bound));
  Pm1Result res;
  res.degree_bound = degree_bound;
  const int D = degree_bound;
  if (D <= 0) return res;
  const int h = D / 2;
  std::size_t left_size = 1;
  for (int i = 0; i < h; ++i) {
    left_size *= 3;
    if (left_size > cfg.memory_budget_entries) {
      res.status = Pm1Status::BoundExceeded;
      return res;
    }
  }
  const IntPolynomial& P = x.minpoly();
  const u64 p1 = pick_prime(P.leading(), (u64{1} << 61) + 12345);
  const u64 p2 = pick_prime(P.leading(), (u64{1} << 60) + 777);
  auto f1 = fingerprints(P, D, p1, 0xA5A5);
  auto f2 = fingerprints(P, D, p2, 0x5A5A);

  struct Entry {
    u64 a, b;
    std::uint32_t idx;
  };
  std::vector<Entry> left{{0, 0, 0}};
  left.reserve(left_size);
  std::uint32_t pw = 1;
  for (int i = 0; i < h; ++i) {
    std::size_t n = left.size();
    for (std::size_t k = 0; k < n; ++k) {
      Entry e = left[k];
      left.push_back({addmod(e.a, f1[static_cast<std::size_t>(i)], p1), addmod(e.b, f2[static_cast<std::size_t>(i)], p2), e.idx + pw});
      left.push_back({submod(e.a, f1[static_cast<std::size_t>(i)], p1), submod(e.b, f2[static_cast<std::size_t>(i)], p2), e.idx + 2 * pw});
    }
    pw *= 3;
  }
  std::sort(left.begin(), left.end(), [](const Entry& u, const Entry& v) { return u.a != v.a ? u.a < v.a : u.b < v.b; });
  res.left_entries = left.size();

  std::vector<int> digits(static_cast<std::size_t>(D), 0);
  auto verify = [&](std::uint32_t idx) -> std::optional<IntPolynomial> {
    std::vector<Rational> coeffs(static_cast<std::size_t>(D), Rational(0));
    for (int i = 0; i < h; ++i) {
      int dgt = static_cast<int>(idx % 3);
      idx /= 3;
      coeffs[static_cast<std::size_t>(i)] = dgt == 0 ? 0 : (dgt == 1 ? 1 : -1);
    }
    for (int i = h; i < D; ++i) coeffs[static_cast<std::size_t>(i)] = digits[static_cast<std::size_t>(i)];
    bool nonzero = false;
    for (auto& c : coeffs)
      if (c != 0) nonzero = true;
    if (!nonzero) return std::nullopt;
    if (!poly_rem_rational(coeffs, P).empty()) return std::nullopt;
    std::size_t low = 0;
    while (coeffs[low] == 0) ++low;
    std::vector<Integer> w;
    for (std::size_t i = low; i < coeffs.size(); ++i) w.push_back(coeffs[i].get_num());
    IntPolynomial wp(std::move(w));
    if (wp.leading() < 0) wp = IntPolynomial() - wp;
    return wp;
  };

  std::optional<IntPolynomial> found;
  auto recurse = [&](auto& self, int i, u64 a, u64 b) -> void {
    if (found) return;
    if (i == D) {
      u64 ta = a ? p1 - a : 0, tb = b ? p2 - b : 0;
      auto lo = std::lower_bound(left.begin(), left.end(), Entry{ta, tb, 0},
                                 [](const Entry& u, const Entry& v) { return u.a != v.a ? u.a < v.a : u.b < v.b; });
      for (auto it = lo; it != left.end() && it->a == ta && it->b == tb; ++it) {
        if (auto w = verify(it->idx)) {
          found = w;
          return;
        }
      }
      return;
    }
    const std::size_t k = static_cast<std::size_t>(i);
    digits[k] = 0;
    self(self, i + 1, a, b);
    digits[k] = 1;
    self(self, i + 1, addmod(a, f1[k], p1), addmod(b, f2[k], p2));
    digits[k] = -1;
    self(self, i + 1, submod(a, f1[k], p1), submod(b, f2[k], p2));
    digits[k] = 0;
  };
  recurse(recurse, h, 0, 0);
  if (found) {
    res.status = Pm1Status::Found;
    res.witness = found;
  } else {
    res.status = Pm1Status::NotFound;
  }
  return res;
}

std::string to_string(Pm1Status s) {
  switch (s) {
    case Pm1Status::Found:
      return "FOUND";
    case Pm1Status::NotFound:
      return "NOT_FOUND";
    case Pm1Status::BoundExceeded:
      return "BOUND_EXCEEDED";
  }
  return "?";
}

}  // namespace bc
