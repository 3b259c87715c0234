#include "bc/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace bc {

namespace {

std::string normalize_literal(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    // U+2212 MINUS SIGN, as it shows up in pasted formulas.
    if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x88 &&
        static_cast<unsigned char>(text[i + 2]) == 0x92) {
      s.push_back('-');
      i += 2;
      continue;
    }
    if (!std::isspace(c) && c != '_') s.push_back(static_cast<char>(c));
  }
  return s;
}

Integer parse_plain_integer(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw std::invalid_argument("bad integer literal: " + s);
  for (std::size_t i = start; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("bad integer literal: " + s);
  Integer z;
  if (z.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
    throw std::invalid_argument("bad integer literal: " + s);
  return z;
}

Rational parse_decimal(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_plain_integer(s));
  std::string ip = s.substr(0, dot);
  std::string fp = s.substr(dot + 1);
  bool neg = !ip.empty() && ip[0] == '-';
  if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
  if (ip.empty() && fp.empty()) throw std::invalid_argument("bad decimal literal: " + s);
  for (char c : ip + fp)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad decimal literal: " + s);
  Integer num = parse_plain_integer((ip.empty() ? "0" : ip) + fp);
  Rational q(num, pow_int(Integer(10), fp.size()));
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace

Integer pow_int(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

Rational pow_rat(const Rational& base, long exp) {
  if (exp >= 0) {
    Rational r(pow_int(base.get_num(), static_cast<unsigned long>(exp)),
               pow_int(base.get_den(), static_cast<unsigned long>(exp)));
    r.canonicalize();
    return r;
  }
  if (base == 0) throw std::domain_error("zero to a negative power");
  Rational r(pow_int(base.get_den(), static_cast<unsigned long>(-exp)),
             pow_int(base.get_num(), static_cast<unsigned long>(-exp)));
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& text) {
  std::string s = normalize_literal(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    Rational q(parse_integer(s.substr(0, slash)), den);
    q.canonicalize();
    return q;
  }
  if (auto caret = s.find('^'); caret != std::string::npos) {
    Rational base = parse_decimal(s.substr(0, caret));
    long e = std::stol(s.substr(caret + 1));
    return pow_rat(base, e);
  }
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    Rational mant = parse_decimal(s.substr(0, epos));
    std::string es = s.substr(epos + 1);
    if (es.empty()) throw std::invalid_argument("bad exponent: " + text);
    long e = std::stol(es);
    return mant * pow_rat(Rational(10), e);
  }
  return parse_decimal(s);
}

Integer parse_integer(const std::string& text) {
  std::string s = normalize_literal(text);
  if (s.find_first_of("eE^./") == std::string::npos) return parse_plain_integer(s);
  Rational q = parse_rational(s);
  if (q.get_den() != 1) throw std::invalid_argument("not an integer: " + text);
  return q.get_num();
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {
// z ≈ m·2^e with |m| < 2^64 (truncated toward zero).
long double split_integer(const Integer& z, long& e) {
  if (z == 0) {
    e = 0;
    return 0.0L;
  }
  std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  if (bits <= 63) {
    e = 0;
    return static_cast<long double>(z.get_si());
  }
  long shift = static_cast<long>(bits) - 64;
  Integer t;
  mpz_tdiv_q_2exp(t.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  Integer a = abs(t);
  unsigned long hi = mpz_getlimbn(a.get_mpz_t(), 0);
  long double m = static_cast<long double>(hi);
  e = shift;
  return sgn(z) < 0 ? -m : m;
}
}  // namespace

long double to_ld(const Integer& z) {
  long e;
  long double m = split_integer(z, e);
  return std::ldexp(m, static_cast<int>(e));
}

long double to_ld(const Rational& q) {
  long e1, e2;
  long double m1 = split_integer(q.get_num(), e1);
  long double m2 = split_integer(q.get_den(), e2);
  return std::ldexp(m1 / m2, static_cast<int>(e1 - e2));
}

long double log2_ld(const Rational& q) {
  if (q <= 0) throw std::domain_error("log2 of non-positive rational");
  long e1, e2;
  long double m1 = split_integer(q.get_num(), e1);
  long double m2 = split_integer(q.get_den(), e2);
  return std::log2(m1 / m2) + static_cast<long double>(e1 - e2);
}

// ---------------------------------------------------------------- Interval

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Rational& q, mpfr_prec_t prec) : Interval(prec) {
  mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Rational& lo, const Rational& hi, mpfr_prec_t prec) : Interval(prec) {
  if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
  mpfr_set_q(lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, hi.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Interval& o) : prec_(o.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& o) noexcept : Interval(o.prec_) {
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

Interval& Interval::operator=(const Interval& o) {
  if (this != &o) {
    prec_ = o.prec_;
    mpfr_set_prec(lo_, prec_);
    mpfr_set_prec(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& o) noexcept {
  std::swap(prec_, o.prec_);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_long(long v, mpfr_prec_t prec) { return Interval(Rational(v), prec); }

Interval Interval::from_mpfr(const mpfr_t v, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set(r.lo_, v, MPFR_RNDD);
  mpfr_set(r.hi_, v, MPFR_RNDU);
  return r;
}

Rational Interval::lo_rational() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), lo_);
  return q;
}

Rational Interval::hi_rational() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), hi_);
  return q;
}

long double Interval::lo_ld() const { return mpfr_get_ld(lo_, MPFR_RNDD); }
long double Interval::hi_ld() const { return mpfr_get_ld(hi_, MPFR_RNDU); }
long double Interval::mid_ld() const {
  mpfr_t m;
  mpfr_init2(m, prec_ + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  long double r = mpfr_get_ld(m, MPFR_RNDN);
  mpfr_clear(m);
  return r;
}

long double Interval::width_ld() const {
  mpfr_t w;
  mpfr_init2(w, prec_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  long double r = mpfr_get_ld(w, MPFR_RNDU);
  mpfr_clear(w);
  return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::certainly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::certainly_negative() const { return mpfr_sgn(hi_) < 0; }
bool Interval::contains(const Rational& q) const {
  return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const {
  Interval r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

namespace {
template <typename Op>
Interval four_corner(const Interval& a, const Interval& b, Op op) {
  mpfr_prec_t p = std::max(a.precision(), b.precision());
  Interval r(p);
  mpfr_t t;
  mpfr_init2(t, p);
  const mpfr_t* xs[2] = {&a.lo(), &a.hi()};
  const mpfr_t* ys[2] = {&b.lo(), &b.hi()};
  bool first = true;
  for (auto* x : xs)
    for (auto* y : ys) {
      op(t, *x, *y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo()) < 0) mpfr_set(r.lo(), t, MPFR_RNDD);
      op(t, *x, *y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi()) > 0) mpfr_set(r.hi(), t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}
}  // namespace

Interval operator*(const Interval& a, const Interval& b) {
  return four_corner(a, b, [](mpfr_t r, const mpfr_t x, const mpfr_t y, mpfr_rnd_t rnd) {
    mpfr_mul(r, x, y, rnd);
  });
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw std::domain_error("Interval division by an interval containing 0");
  return four_corner(a, b, [](mpfr_t r, const mpfr_t x, const mpfr_t y, mpfr_rnd_t rnd) {
    mpfr_div(r, x, y, rnd);
  });
}

Interval Interval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  if (mpfr_sgn(hi_) <= 0) return -*this;
  Interval r(prec_);
  mpfr_set_zero(r.lo_, 1);
  if (mpfr_cmpabs(lo_, hi_) > 0)
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  else
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::sqr() const {
  Interval a = abs();
  Interval r(prec_);
  mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::sqrt() const {
  if (mpfr_sgn(hi_) < 0) throw std::domain_error("sqrt of negative interval");
  Interval r(prec_);
  if (mpfr_sgn(lo_) <= 0)
    mpfr_set_zero(r.lo_, 1);
  else
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::log2() const {
  if (mpfr_sgn(lo_) <= 0) throw std::domain_error("log2 of interval not bounded away from 0");
  Interval r(prec_);
  mpfr_log2(r.lo_, lo_, MPFR_RNDD);
  mpfr_log2(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::ln() const {
  if (mpfr_sgn(lo_) <= 0) throw std::domain_error("ln of interval not bounded away from 0");
  Interval r(prec_);
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::exp() const {
  Interval r(prec_);
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::pow_ui(unsigned long e) const {
  if (mpfr_sgn(lo_) < 0) throw std::domain_error("pow_ui needs a non-negative base");
  Interval r(prec_);
  mpfr_pow_ui(r.lo_, lo_, e, MPFR_RNDD);
  mpfr_pow_ui(r.hi_, hi_, e, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

bool certainly_less(const Interval& a, const Interval& b) { return mpfr_cmp(a.hi(), b.lo()) < 0; }

// ---------------------------------------------------------------- Rng

Rng::Rng(std::uint64_t seed) : eng_(seed) {}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (range == ~std::uint64_t{0}) return static_cast<std::int64_t>(eng_());
  std::uint64_t span = range + 1;
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % span);
}

double Rng::uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::gamma(double shape) {
  if (shape <= 0) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double u1 = uniform01(), u2 = uniform01();
    if (u1 <= 0.0) continue;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    double v = 1.0 + c * z;
    if (v <= 0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u <= 0.0) continue;
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  return splitmix(a ^ splitmix(b));
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void CompensatedSum::add(long double x) {
  long double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
  ++n_;
}

long double xlog2x(long double x) { return x > 0 ? x * std::log2(x) : 0.0L; }

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_threads.store(n);
}

unsigned thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace bc
