#include "bc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <type_traits>

namespace bc {

using u128 = unsigned __int128;

namespace {

Integer from_u128(u128 v) {
  Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  Integer r = hi;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
  return r + lo;
}

bool fits_u128(const Integer& z) { return sgn(z) >= 0 && mpz_sizeinbase(z.get_mpz_t(), 2) <= 126; }

u128 to_u128(const Integer& z) {
  Integer hi = z >> 64;
  Integer lo = z - (hi << 64);
  return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) | mpz_get_ui(lo.get_mpz_t());
}

bool fits_i64(const Integer& z) { return mpz_sizeinbase(z.get_mpz_t(), 2) <= 62; }

bool same_owner(const AlgebraicPtr& a, const AlgebraicPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || a->same_number(*b);
}

// Long double approximations of λ^j, j < dim.
std::vector<long double> lambda_powers_ld(const AlgebraicPtr& owner, int dim) {
  std::vector<long double> L(static_cast<std::size_t>(dim), 1.0L);
  if (!owner) return L;
  Interval lam = owner->enclosure(160);
  Interval pw = Interval(Rational(1), 160);
  for (int j = 0; j < dim; ++j) {
    L[static_cast<std::size_t>(j)] = pw.mid_ld();
    pw = pw * lam;
  }
  return L;
}

constexpr long double kRel = 0x1p-58L;

}  // namespace

// ---------------------------------------------------------------- canonical form

struct MeasureBuilder {
  static void compute_approx(DiscreteMeasure& m) {
    const std::size_t n = m.weights_.size();
    m.approx_.assign(n, 0.0L);
    m.err_.assign(n, 0.0L);
    long double dinv = 1.0L / to_ld(m.pos_den_);
    if (m.is_rational()) {
      for (std::size_t i = 0; i < n; ++i) {
        long double v = to_ld(m.coords_[i]) * dinv;
        m.approx_[i] = v;
        m.err_[i] = std::fabs(v) * kRel + 0x1p-16000L;
      }
      return;
    }
    auto L = lambda_powers_ld(m.owner_, m.dim_);
    const std::size_t d = static_cast<std::size_t>(m.dim_);
    for (std::size_t i = 0; i < n; ++i) {
      long double v = 0, mag = 0;
      for (std::size_t j = 0; j < d; ++j) {
        long double t = to_ld(m.coords_[i * d + j]) * L[j];
        v += t;
        mag += std::fabs(t);
      }
      m.approx_[i] = v * dinv;
      m.err_[i] = mag * std::fabs(dinv) * kRel * static_cast<long double>(d + 1) + 0x1p-16000L;
    }
  }

  // Exact sign of (Σ_j (a_j − b_j) λ^j).
  static int exact_cmp(const DiscreteMeasure& m, const Integer* a, const Integer* b) {
    if (m.is_rational()) return cmp(*a, *b);
    std::vector<Rational> diff(static_cast<std::size_t>(m.dim_));
    bool eq = true;
    for (int j = 0; j < m.dim_; ++j) {
      diff[static_cast<std::size_t>(j)] = Rational(a[j] - b[j]);
      if (a[j] != b[j]) eq = false;
    }
    if (eq) return 0;
    return m.owner_->sign_of(diff);
  }

  // Sorts by value, merges equal positions, drops zero weights, reduces fractions.
  static void finalize(DiscreteMeasure& m, bool sorted_unique) {
    const std::size_t d = static_cast<std::size_t>(m.dim_);
    std::size_t n = m.weights_.size();
    if (m.pos_den_ < 0) {
      m.pos_den_ = -m.pos_den_;
      for (auto& c : m.coords_) c = -c;
    }
    if (m.pos_den_ == 0 || m.mass_den_ <= 0) throw std::invalid_argument("measure: bad denominator");
    if (!sorted_unique && n > 1) {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      auto lex = [&](std::size_t x, std::size_t y) {
        for (std::size_t j = 0; j < d; ++j) {
          int c = cmp(m.coords_[x * d + j], m.coords_[y * d + j]);
          if (c != 0) return c < 0;
        }
        return false;
      };
      std::sort(idx.begin(), idx.end(), lex);
      std::vector<Integer> nc;
      std::vector<Integer> nw;
      nc.reserve(n * d);
      nw.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = idx[k];
        bool dup = !nw.empty();
        if (dup) {
          std::size_t last = nw.size() - 1;
          for (std::size_t j = 0; j < d; ++j)
            if (nc[last * d + j] != m.coords_[i * d + j]) {
              dup = false;
              break;
            }
        }
        if (dup) {
          nw.back() += m.weights_[i];
        } else {
          for (std::size_t j = 0; j < d; ++j) nc.push_back(std::move(m.coords_[i * d + j]));
          nw.push_back(std::move(m.weights_[i]));
        }
      }
      m.coords_ = std::move(nc);
      m.weights_ = std::move(nw);
      n = m.weights_.size();
    }
    // Drop zero weights.
    {
      std::size_t out = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (m.weights_[i] < 0) throw std::invalid_argument("measure: negative mass");
        if (m.weights_[i] == 0) continue;
        if (out != i) {
          m.weights_[out] = std::move(m.weights_[i]);
          for (std::size_t j = 0; j < d; ++j) m.coords_[out * d + j] = std::move(m.coords_[i * d + j]);
        }
        ++out;
      }
      m.weights_.resize(out);
      m.coords_.resize(out * d);
      n = out;
    }
    // Lowest terms.
    Integer g = m.pos_den_;
    for (const auto& c : m.coords_) {
      if (g == 1) break;
      g = gcd(g, c);
    }
    if (g != 1) {
      m.pos_den_ /= g;
      for (auto& c : m.coords_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    }
    Integer h = m.mass_den_;
    for (const auto& w : m.weights_) {
      if (h == 1) break;
      h = gcd(h, w);
    }
    if (h != 1 && n > 0) {
      m.mass_den_ /= h;
      for (auto& w : m.weights_) mpz_divexact(w.get_mpz_t(), w.get_mpz_t(), h.get_mpz_t());
    }
    if (n == 0) {
      m.pos_den_ = 1;
      m.mass_den_ = 1;
    }
    compute_approx(m);
    if (!sorted_unique && n > 1) {
      if (m.is_rational()) return;  // lexicographic order is numeric order
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (m.approx_[x] + m.err_[x] < m.approx_[y] - m.err_[y]) return true;
        if (m.approx_[y] + m.err_[y] < m.approx_[x] - m.err_[x]) return false;
        return exact_cmp(m, &m.coords_[x * d], &m.coords_[y * d]) < 0;
      });
      std::vector<Integer> nc(n * d), nw(n);
      std::vector<long double> na(n), ne(n);
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = idx[k];
        for (std::size_t j = 0; j < d; ++j) nc[k * d + j] = std::move(m.coords_[i * d + j]);
        nw[k] = std::move(m.weights_[i]);
        na[k] = m.approx_[i];
        ne[k] = m.err_[i];
      }
      m.coords_ = std::move(nc);
      m.weights_ = std::move(nw);
      m.approx_ = std::move(na);
      m.err_ = std::move(ne);
    }
  }

  static DiscreteMeasure make(AlgebraicPtr owner, int dim, Integer D, std::vector<Integer> coords, Integer W,
                              std::vector<Integer> weights, bool sorted_unique) {
    if (coords.size() != weights.size() * static_cast<std::size_t>(dim))
      throw std::invalid_argument("measure: coordinate/weight size mismatch");
    DiscreteMeasure m;
    if (owner && owner->exact_value()) {
      // Collapse to rational positions.
      Rational lam = *owner->exact_value();
      std::vector<Rational> pw(static_cast<std::size_t>(dim));
      Rational acc = 1;
      for (int j = 0; j < dim; ++j) {
        pw[static_cast<std::size_t>(j)] = acc;
        acc *= lam;
      }
      std::vector<Position> pos;
      std::vector<Rational> ms;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        Rational v = 0;
        for (int j = 0; j < dim; ++j) v += Rational(coords[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)]) * pw[static_cast<std::size_t>(j)];
        v /= Rational(D);
        pos.push_back(Position::rational(v));
        ms.push_back(Rational(weights[i], W));
      }
      return DiscreteMeasure::from_atoms(pos, ms);
    }
    m.owner_ = std::move(owner);
    m.dim_ = m.owner_ ? m.owner_->degree() : 1;
    if (m.dim_ != dim) throw std::invalid_argument("measure: dimension does not match owner degree");
    m.pos_den_ = std::move(D);
    m.coords_ = std::move(coords);
    m.mass_den_ = std::move(W);
    m.weights_ = std::move(weights);
    finalize(m, sorted_unique);
    return m;
  }

  static DiscreteMeasure& mut(DiscreteMeasure& m) { return m; }
};

// ---------------------------------------------------------------- accessors

Position Position::algebraic(AlgebraicPtr owner, std::vector<Rational> coeffs) {
  if (!owner) throw std::invalid_argument("Position::algebraic needs an owner");
  if (static_cast<int>(coeffs.size()) > owner->degree()) coeffs = owner->reduce(coeffs);
  coeffs.resize(static_cast<std::size_t>(owner->degree()), Rational(0));
  return {std::move(owner), std::move(coeffs)};
}

DiscreteMeasure DiscreteMeasure::from_atoms(const std::vector<Position>& positions, const std::vector<Rational>& masses) {
  if (positions.size() != masses.size()) throw std::invalid_argument("from_atoms: size mismatch");
  AlgebraicPtr owner;
  for (const auto& p : positions)
    if (p.owner) {
      if (!owner)
        owner = p.owner;
      else if (!same_owner(owner, p.owner))
        throw std::invalid_argument("measure: positions with different owners");
    }
  if (owner && owner->exact_value()) {
    std::vector<std::pair<Rational, Rational>> atoms;
    Rational lam = *owner->exact_value();
    for (std::size_t i = 0; i < positions.size(); ++i) {
      Rational v = 0, pw = 1;
      for (const auto& c : positions[i].coeffs) {
        v += c * pw;
        pw *= lam;
      }
      atoms.emplace_back(v, masses[i]);
    }
    return from_rational_atoms(atoms);
  }
  const int dim = owner ? owner->degree() : 1;
  Integer D = 1, W = 1;
  std::vector<std::vector<Rational>> cs;
  for (const auto& p : positions) {
    std::vector<Rational> c = p.coeffs;
    if (c.empty()) c.push_back(0);
    if (!p.owner && owner) c.resize(static_cast<std::size_t>(dim), Rational(0));
    if (p.owner && static_cast<int>(c.size()) != dim) c = Position::algebraic(owner, c).coeffs;
    if (!owner && c.size() != 1) throw std::invalid_argument("rational position with several coefficients");
    for (const auto& x : c) D = lcm(D, x.get_den());
    cs.push_back(std::move(c));
  }
  for (const auto& m : masses) {
    if (m < 0) throw std::invalid_argument("measure: negative mass");
    W = lcm(W, m.get_den());
  }
  std::vector<Integer> coords, weights;
  for (const auto& c : cs)
    for (const auto& x : c) coords.push_back(Rational(x * D).get_num());
  for (const auto& m : masses) weights.push_back(Rational(m * W).get_num());
  return MeasureBuilder::make(owner, dim, D, std::move(coords), W, std::move(weights), false);
}

DiscreteMeasure DiscreteMeasure::from_rational_atoms(const std::vector<std::pair<Rational, Rational>>& atoms) {
  std::vector<Position> pos;
  std::vector<Rational> ms;
  for (const auto& [x, m] : atoms) {
    pos.push_back(Position::rational(x));
    ms.push_back(m);
  }
  if (pos.empty()) return DiscreteMeasure();
  return from_atoms(pos, ms);
}

DiscreteMeasure DiscreteMeasure::from_raw(AlgebraicPtr owner, int dim, Integer pos_den, std::vector<Integer> coords,
                                          Integer mass_den, std::vector<Integer> weights) {
  return MeasureBuilder::make(std::move(owner), dim, std::move(pos_den), std::move(coords), std::move(mass_den),
                              std::move(weights), false);
}

Rational DiscreteMeasure::position_rational(std::size_t i) const {
  if (!is_rational()) throw std::logic_error("position_rational on an algebraic measure");
  Rational q(coords_[i], pos_den_);
  q.canonicalize();
  return q;
}

std::vector<Rational> DiscreteMeasure::position_coeffs(std::size_t i) const {
  std::vector<Rational> v;
  for (int j = 0; j < dim_; ++j) {
    Rational q(coord(i, j), pos_den_);
    q.canonicalize();
    v.push_back(q);
  }
  return v;
}

Position DiscreteMeasure::position(std::size_t i) const { return {owner_, position_coeffs(i)}; }

Rational DiscreteMeasure::mass(std::size_t i) const {
  Rational q(weights_[i], mass_den_);
  q.canonicalize();
  return q;
}

Rational DiscreteMeasure::total_mass() const {
  Integer s = 0;
  for (const auto& w : weights_) s += w;
  Rational q(s, mass_den_);
  q.canonicalize();
  return q;
}

Interval DiscreteMeasure::position_enclosure(std::size_t i, mpfr_prec_t prec) const {
  if (is_rational()) return Interval(position_rational(i), prec);
  return owner_->evaluate(position_coeffs(i), prec);
}

int DiscreteMeasure::compare_positions(std::size_t i, std::size_t k) const {
  if (i == k) return 0;
  if (approx_[i] + err_[i] < approx_[k] - err_[k]) return -1;
  if (approx_[k] + err_[k] < approx_[i] - err_[i]) return 1;
  return MeasureBuilder::exact_cmp(*this, &coords_[i * static_cast<std::size_t>(dim_)], &coords_[k * static_cast<std::size_t>(dim_)]);
}

bool DiscreteMeasure::integer_supported() const {
  return is_rational() && pos_den_ == 1;
}

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return same_owner(a.owner_, b.owner_) && a.dim_ == b.dim_ && a.pos_den_ == b.pos_den_ && a.coords_ == b.coords_ &&
         a.mass_den_ == b.mass_den_ && a.weights_ == b.weights_;
}

// ---------------------------------------------------------------- JSON

nlohmann::json DiscreteMeasure::to_json() const {
  nlohmann::json j;
  if (owner_) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& c : owner_->minpoly().coeffs()) poly.push_back(c.get_str());
    auto iv = owner_->isolating_interval();
    j["owner"] = {{"poly", poly}, {"interval", {to_fraction_string(iv.lo), to_fraction_string(iv.hi)}}};
  } else {
    j["owner"] = nullptr;
  }
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    nlohmann::json a;
    if (owner_) {
      nlohmann::json pos = nlohmann::json::array();
      for (const auto& c : position_coeffs(i)) pos.push_back(to_fraction_string(c));
      a["pos"] = pos;
    } else {
      a["pos"] = to_fraction_string(position_rational(i));
    }
    a["mass"] = to_fraction_string(mass(i));
    atoms.push_back(a);
  }
  j["atoms"] = atoms;
  return j;
}

namespace {
Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(Integer(std::to_string(v.get<long long>())));
  throw std::invalid_argument("expected a rational string or integer in measure JSON");
}
}  // namespace

DiscreteMeasure DiscreteMeasure::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    throw std::invalid_argument("measure JSON needs an \"atoms\" array");
  AlgebraicPtr owner;
  if (j.contains("owner") && !j["owner"].is_null()) {
    const auto& o = j["owner"];
    if (!o.contains("poly") || !o.contains("interval")) throw std::invalid_argument("owner needs poly and interval");
    IntPolynomial p;
    if (o["poly"].is_string()) {
      p = parse_polynomial(o["poly"].get<std::string>());
    } else {
      std::vector<Integer> cs;
      for (const auto& c : o["poly"]) cs.push_back(json_rational(c).get_num());
      p = IntPolynomial(cs);
    }
    const auto& iv = o["interval"];
    if (!iv.is_array() || iv.size() != 2) throw std::invalid_argument("owner interval must be [lo, hi]");
    owner = AlgebraicNumber::make(p, json_rational(iv[0]), json_rational(iv[1]));
  }
  std::vector<Position> pos;
  std::vector<Rational> ms;
  for (const auto& a : j["atoms"]) {
    if (!a.contains("pos") || !a.contains("mass")) throw std::invalid_argument("atom needs pos and mass");
    if (a["pos"].is_array()) {
      if (!owner) throw std::invalid_argument("coefficient-vector position without an owner");
      std::vector<Rational> c;
      for (const auto& x : a["pos"]) c.push_back(json_rational(x));
      pos.push_back(Position::algebraic(owner, c));
    } else {
      pos.push_back(Position::rational(json_rational(a["pos"])));
    }
    Rational m = json_rational(a["mass"]);
    if (m <= 0) throw std::invalid_argument("atom masses must be positive");
    ms.push_back(m);
  }
  if (pos.empty()) return DiscreteMeasure();
  return from_atoms(pos, ms);
}

// ---------------------------------------------------------------- operations

DiscreteMeasure dirac(const Position& x) { return DiscreteMeasure::from_atoms({x}, {Rational(1)}); }

DiscreteMeasure bernoulli_pair(const Position& center, const Rational& distance, const Rational& mass) {
  if (distance <= 0) throw std::invalid_argument("bernoulli_pair: distance must be positive");
  if (mass <= 0 || mass > 1) throw std::invalid_argument("bernoulli_pair: mass must be in (0, 1]");
  Position a = center, b = center;
  if (a.coeffs.empty()) a.coeffs = b.coeffs = {Rational(0)};
  a.coeffs[0] -= distance / 2;
  b.coeffs[0] += distance / 2;
  return DiscreteMeasure::from_atoms({a, b}, {mass / 2, mass / 2});
}

namespace {

// Brings b onto a's owner/denominator: returns scaled coordinate arrays.
struct Aligned {
  AlgebraicPtr owner;
  int dim;
  Integer D;
  std::vector<Integer> ca, cb;
};

Aligned align(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (!same_owner(a.owner(), b.owner())) {
    // A rational measure can live on any owner; mixed algebraic owners cannot.
    if (a.owner() && b.owner()) throw std::invalid_argument("convolve: measures with different owners");
  }
  Aligned r;
  r.owner = a.owner() ? a.owner() : b.owner();
  r.dim = r.owner ? r.owner->degree() : 1;
  r.D = lcm(a.pos_den(), b.pos_den());
  auto lift = [&](const DiscreteMeasure& m, std::vector<Integer>& out) {
    Integer f = r.D / m.pos_den();
    out.resize(m.size() * static_cast<std::size_t>(r.dim));
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int j = 0; j < r.dim; ++j) {
        std::size_t k = i * static_cast<std::size_t>(r.dim) + static_cast<std::size_t>(j);
        out[k] = j < m.dim() ? Integer(m.coord(i, j) * f) : Integer(0);
      }
  };
  lift(a, r.ca);
  lift(b, r.cb);
  return r;
}

}  // namespace

DiscreteMeasure convolve(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.empty() || b.empty()) return DiscreteMeasure();
  Aligned al = align(a, b);
  const std::size_t na = a.size(), nb = b.size();
  Integer W = a.mass_den() * b.mass_den();
  if (!al.owner) {
    const Integer& amin = al.ca.front();
    const Integer& amax = al.ca.back();
    const Integer& bmin = al.cb.front();
    const Integer& bmax = al.cb.back();
    Integer span = amax + bmax - amin - bmin + 1;
    Integer maxwa = *std::max_element(a.weights().begin(), a.weights().end());
    Integer maxwb = *std::max_element(b.weights().begin(), b.weights().end());
    bool dense = fits_i64(amin) && fits_i64(amax) && fits_i64(bmin) && fits_i64(bmax) && span <= 4 * Integer(static_cast<unsigned long>(na)) * Integer(static_cast<unsigned long>(nb)) + 64 &&
                 span <= (1 << 26);
    bool small_w = fits_u128(Integer(maxwa * maxwb * static_cast<unsigned long>(std::min(na, nb) + 1)));
    if (dense && small_w) {
      const long base = amin.get_si() + bmin.get_si();
      std::vector<long> xa(na), xb(nb);
      std::vector<u128> wa(na), wb(nb);
      for (std::size_t i = 0; i < na; ++i) {
        xa[i] = al.ca[i].get_si();
        wa[i] = to_u128(a.weight(i));
      }
      for (std::size_t k = 0; k < nb; ++k) {
        xb[k] = al.cb[k].get_si();
        wb[k] = to_u128(b.weight(k));
      }
      std::vector<u128> acc(static_cast<std::size_t>(span.get_si()), 0);
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t k = 0; k < nb; ++k) acc[static_cast<std::size_t>(xa[i] + xb[k] - base)] += wa[i] * wb[k];
      std::vector<Integer> coords, weights;
      for (std::size_t t = 0; t < acc.size(); ++t)
        if (acc[t]) {
          coords.emplace_back(static_cast<long>(t) + base);
          weights.push_back(from_u128(acc[t]));
        }
      return MeasureBuilder::make(nullptr, 1, al.D, std::move(coords), W, std::move(weights), true);
    }
  }
  const std::size_t d = static_cast<std::size_t>(al.dim);
  std::vector<Integer> coords(na * nb * d), weights(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t k = 0; k < nb; ++k) {
      std::size_t t = i * nb + k;
      for (std::size_t j = 0; j < d; ++j) coords[t * d + j] = al.ca[i * d + j] + al.cb[k * d + j];
      weights[t] = a.weight(i) * b.weight(k);
    }
  return MeasureBuilder::make(al.owner, al.dim, al.D, std::move(coords), W, std::move(weights), false);
}

DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Aligned al = align(a, b);
  Integer W = lcm(a.mass_den(), b.mass_den());
  std::vector<Integer> coords = std::move(al.ca);
  coords.insert(coords.end(), al.cb.begin(), al.cb.end());
  std::vector<Integer> weights;
  Integer fa = W / a.mass_den(), fb = W / b.mass_den();
  for (const auto& w : a.weights()) weights.push_back(w * fa);
  for (const auto& w : b.weights()) weights.push_back(w * fb);
  return MeasureBuilder::make(al.owner, al.dim, al.D, std::move(coords), W, std::move(weights), false);
}

DiscreteMeasure scale_mass(const DiscreteMeasure& m, const Rational& c) {
  if (c < 0) throw std::invalid_argument("scale_mass: negative factor");
  if (m.empty() || c == 0) return DiscreteMeasure();
  std::vector<Integer> weights;
  for (const auto& w : m.weights()) weights.push_back(w * c.get_num());
  return MeasureBuilder::make(m.owner(), m.dim(), m.pos_den(), m.coords(), m.mass_den() * c.get_den(), std::move(weights),
                              true);
}

DiscreteMeasure affine(const DiscreteMeasure& m, const Rational& scale, const Rational& shift) {
  if (scale == 0) throw std::invalid_argument("affine: scale must be nonzero");
  if (m.empty()) return m;
  // New position = (s_n·c·t_d + t_n·D·s_d·[j=0]) / (D·s_d·t_d).
  const Integer& sn = scale.get_num();
  const Integer& sd = scale.get_den();
  const Integer& tn = shift.get_num();
  const Integer& td = shift.get_den();
  Integer D = m.pos_den() * sd * td;
  const std::size_t d = static_cast<std::size_t>(m.dim());
  std::vector<Integer> coords(m.coords().size());
  Integer add0 = tn * m.pos_den() * sd;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) {
      coords[i * d + j] = sn * td * m.coord(i, static_cast<int>(j));
      if (j == 0) coords[i * d] += add0;
    }
  std::vector<Integer> weights = m.weights();
  if (m.is_rational()) {
    if (scale < 0) {
      std::reverse(coords.begin(), coords.end());
      std::reverse(weights.begin(), weights.end());
    }
    return MeasureBuilder::make(nullptr, 1, D, std::move(coords), m.mass_den(), std::move(weights), true);
  }
  return MeasureBuilder::make(m.owner(), m.dim(), D, std::move(coords), m.mass_den(), std::move(weights), false);
}

DiscreteMeasure restrict(const DiscreteMeasure& m, const RealInterval& J) {
  if (m.empty()) return m;
  const std::size_t d = static_cast<std::size_t>(m.dim());
  auto side = [&](std::size_t i, const Rational& q) -> int {
    // sign(position_i − q)
    if (m.is_rational()) return cmp(Rational(m.coord(i), m.pos_den()), q);
    long double qa = to_ld(q);
    long double qe = std::fabs(qa) * kRel;
    if (m.approx(i) - m.approx_error(i) > qa + qe) return 1;
    if (m.approx(i) + m.approx_error(i) < qa - qe) return -1;
    std::vector<Rational> c = m.position_coeffs(i);
    c[0] -= q;
    return m.owner()->sign_of(c);
  };
  std::vector<Integer> coords, weights;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (J.lo) {
      int s = side(i, *J.lo);
      if (s < 0 || (s == 0 && !J.lo_closed)) continue;
    }
    if (J.hi) {
      int s = side(i, *J.hi);
      if (s > 0 || (s == 0 && !J.hi_closed)) continue;
    }
    for (std::size_t j = 0; j < d; ++j) coords.push_back(m.coord(i, static_cast<int>(j)));
    weights.push_back(m.weight(i));
  }
  if (weights.empty()) return DiscreteMeasure();
  return MeasureBuilder::make(m.owner(), m.dim(), m.pos_den(), std::move(coords), m.mass_den(), std::move(weights), true);
}

RationalInterval min_gap(const DiscreteMeasure& m) {
  if (m.size() < 2) throw std::invalid_argument("min_gap needs at least two atoms");
  if (m.is_rational()) {
    Integer best = m.coord(1) - m.coord(0);
    for (std::size_t i = 2; i < m.size(); ++i) {
      Integer g = m.coord(i) - m.coord(i - 1);
      if (g < best) best = g;
    }
    Rational q(best, m.pos_den());
    q.canonicalize();
    return {q, q};
  }
  // Screen with the long double approximations, then enclose the candidates.
  long double best_hi = INFINITY;
  std::vector<long double> lo(m.size()), hi(m.size());
  for (std::size_t i = 1; i < m.size(); ++i) {
    long double g = m.approx(i) - m.approx(i - 1);
    long double e = m.approx_error(i) + m.approx_error(i - 1) + std::fabs(g) * kRel;
    lo[i] = g - e;
    hi[i] = g + e;
    best_hi = std::min(best_hi, hi[i]);
  }
  std::optional<Rational> rlo, rhi;
  const mpfr_prec_t prec = 192;
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (lo[i] > best_hi) continue;
    std::vector<Rational> a = m.position_coeffs(i), b = m.position_coeffs(i - 1);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
    Interval v = m.owner()->evaluate(a, prec);
    Rational l = v.lo_rational(), h = v.hi_rational();
    if (!rlo || l < *rlo) rlo = l;
    if (!rhi || h < *rhi) rhi = h;
  }
  if (*rlo < 0) *rlo = 0;
  return {*rlo, *rhi};
}

// ---------------------------------------------------------------- level measures

std::vector<int> level_indices(const AlgebraicNumber& lambda, const LevelInterval& I, int bound) {
  if (lambda.compare(0) <= 0 || lambda.compare(1) >= 0) throw std::invalid_argument("level measures need λ in (0, 1)");
  if (!I.lo.is_power && I.lo.value <= 0) throw std::invalid_argument("level interval must have a positive lower endpoint");
  auto cmp_power = [&](int n, const LevelEndpoint& e) -> int {
    // sign(λ^n − endpoint)
    if (e.is_power) return n < e.power ? 1 : (n == e.power ? 0 : -1);
    if (auto q = lambda.exact_value()) return sgn(pow_rat(*q, n) - e.value);
    std::vector<Rational> c = lambda.power_coeffs(n);
    c[0] -= e.value;
    return lambda.sign_of(c);
  };
  std::vector<int> out;
  const int max_n = 100000;
  for (int n = 0;; ++n) {
    if (n > max_n) throw ResourceLimit("level interval needs more than 100000 powers of λ");
    int lo = cmp_power(n, I.lo);
    if (lo < 0 || (lo == 0 && !I.lo.closed)) {
      if (lo < 0) break;
      continue;
    }
    int hi = cmp_power(n, I.hi);
    if (hi < 0 || (hi == 0 && I.hi.closed)) {
      out.push_back(n);
      if (static_cast<int>(out.size()) > bound)
        throw ResourceLimit("level interval holds more than " + std::to_string(bound) + " powers of λ");
    }
  }
  return out;
}

namespace {

template <class W>
W weight_from(const Integer& z) {
  if constexpr (std::is_same_v<W, u128>)
    return to_u128(z);
  else
    return z;
}
template <class W>
Integer weight_to(const W& w) {
  if constexpr (std::is_same_v<W, u128>)
    return from_u128(w);
  else
    return w;
}
template <class C>
C coord_from(const Integer& z) {
  if constexpr (std::is_same_v<C, long>)
    return z.get_si();
  else
    return z;
}
template <class C>
Integer coord_to(const C& c) {
  if constexpr (std::is_same_v<C, long>)
    return Integer(c);
  else
    return c;
}

// Two-point convolution steps with merge-dedup; positions stay sorted since
// adding a constant preserves order.
template <class C, class W>
DiscreteMeasure enumerate_level(const AlgebraicPtr& owner, int dim, const Integer& D,
                                const std::vector<std::vector<Integer>>& steps, const Integer& wp, const Integer& wm,
                                const Integer& Wtot) {
  const std::size_t d = static_cast<std::size_t>(dim);
  std::vector<C> xs(d, C(0));
  std::vector<W> ws{W(1)};
  std::vector<long double> ap{0.0L}, er{0.0L};
  auto L = lambda_powers_ld(owner, dim);
  const long double dinv = 1.0L / to_ld(D);
  const W wplus = weight_from<W>(wp), wminus = weight_from<W>(wm);
  std::vector<C> step(d);
  std::vector<Rational> diff(d);
  for (const auto& st : steps) {
    long double sv = 0, smag = 0;
    for (std::size_t j = 0; j < d; ++j) {
      step[j] = coord_from<C>(st[j]);
      long double t = to_ld(st[j]) * L[j];
      sv += t;
      smag += std::fabs(t);
    }
    sv *= dinv;
    long double se = smag * std::fabs(dinv) * kRel * static_cast<long double>(d + 1);
    const std::size_t n = ws.size();
    std::vector<C> nx;
    std::vector<W> nw;
    std::vector<long double> na, ne;
    nx.reserve(2 * n * d);
    nw.reserve(2 * n);
    na.reserve(2 * n);
    ne.reserve(2 * n);
    // minus list: x − step (smaller), plus list: x + step.
    std::size_t i = 0, k = 0;
    auto cmp_mp = [&](std::size_t a, std::size_t b) -> int {
      // sign((x_a − s) − (x_b + s))
      if (!owner) {
        C lhs = xs[a] - step[0];
        C rhs = xs[b] + step[0];
        return lhs < rhs ? -1 : (rhs < lhs ? 1 : 0);
      }
      bool eq = true;
      for (std::size_t j = 0; j < d; ++j)
        if (xs[a * d + j] - step[j] != xs[b * d + j] + step[j]) {
          eq = false;
          break;
        }
      if (eq) return 0;
      long double va = ap[a] - sv, vb = ap[b] + sv;
      long double e = er[a] + er[b] + 2 * se + (std::fabs(va) + std::fabs(vb)) * kRel;
      if (va + e < vb) return -1;
      if (vb + e < va) return 1;
      for (std::size_t j = 0; j < d; ++j) diff[j] = Rational(coord_to<C>(xs[a * d + j] - xs[b * d + j] - 2 * step[j]));
      return owner->sign_of(diff);
    };
    auto push = [&](std::size_t src, int sgn_, const W& w) {
      for (std::size_t j = 0; j < d; ++j) nx.push_back(sgn_ > 0 ? C(xs[src * d + j] + step[j]) : C(xs[src * d + j] - step[j]));
      nw.push_back(w);
      long double v = ap[src] + sgn_ * sv;
      na.push_back(v);
      ne.push_back(er[src] + se + std::fabs(v) * kRel);
    };
    while (i < n || k < n) {
      if (k >= n) {
        push(i, -1, ws[i] * wminus);
        ++i;
      } else if (i >= n) {
        push(k, 1, ws[k] * wplus);
        ++k;
      } else {
        int c = cmp_mp(i, k);
        if (c < 0) {
          push(i, -1, ws[i] * wminus);
          ++i;
        } else if (c > 0) {
          push(k, 1, ws[k] * wplus);
          ++k;
        } else {
          push(i, -1, ws[i] * wminus + ws[k] * wplus);
          ++i;
          ++k;
        }
      }
    }
    xs.swap(nx);
    ws.swap(nw);
    ap.swap(na);
    er.swap(ne);
  }
  std::vector<Integer> coords(xs.size()), weights(ws.size());
  for (std::size_t t = 0; t < xs.size(); ++t) coords[t] = coord_to<C>(xs[t]);
  for (std::size_t t = 0; t < ws.size(); ++t) weights[t] = weight_to<W>(ws[t]);
  return MeasureBuilder::make(owner, dim, D, std::move(coords), Wtot, std::move(weights), true);
}

}  // namespace

DiscreteMeasure level_measure_indices(const AlgebraicPtr& lambda, const Rational& p, const std::vector<int>& indices) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("bias p must lie in (0, 1)");
  const Integer& a = p.get_num();
  const Integer& b = p.get_den();
  Integer Wtot = pow_int(b, static_cast<unsigned long>(indices.size()));
  Integer wp = a, wm = b - a;
  AlgebraicPtr owner;
  int dim = 1;
  Integer D = 1;
  std::vector<std::vector<Integer>> steps;
  if (indices.empty()) return dirac(Position::rational(0));
  int nmax = *std::max_element(indices.begin(), indices.end());
  if (auto q = lambda->exact_value()) {
    const Integer& u = q->get_num();
    const Integer& v = q->get_den();
    D = pow_int(v, static_cast<unsigned long>(nmax));
    for (int n : indices) steps.push_back({pow_int(u, static_cast<unsigned long>(n)) * pow_int(v, static_cast<unsigned long>(nmax - n))});
  } else {
    owner = lambda;
    dim = lambda->degree();
    std::vector<std::vector<Rational>> pcs;
    for (int n : indices) {
      pcs.push_back(lambda->power_coeffs(n));
      for (const auto& c : pcs.back()) D = lcm(D, c.get_den());
    }
    for (const auto& pc : pcs) {
      std::vector<Integer> s;
      for (const auto& c : pc) s.push_back(Rational(c * D).get_num());
      steps.push_back(std::move(s));
    }
  }
  Integer total = 0;
  for (const auto& s : steps)
    for (const auto& c : s) total += abs(c);
  const bool small_c = fits_i64(total);
  const bool small_w = fits_u128(Wtot);
  if (small_c && small_w) return enumerate_level<long, u128>(owner, dim, D, steps, wp, wm, Wtot);
  if (small_c) return enumerate_level<long, Integer>(owner, dim, D, steps, wp, wm, Wtot);
  if (small_w) return enumerate_level<Integer, u128>(owner, dim, D, steps, wp, wm, Wtot);
  return enumerate_level<Integer, Integer>(owner, dim, D, steps, wp, wm, Wtot);
}

DiscreteMeasure level_measure(const AlgebraicPtr& lambda, const Rational& p, const LevelInterval& I, int bound) {
  return level_measure_indices(lambda, p, level_indices(*lambda, I, bound));
}

// ---------------------------------------------------------------- random measures

namespace {

std::vector<Integer> profile_weights(Rng& rng, std::size_t n, MassProfile profile, bool allow_zero) {
  std::vector<Integer> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (profile) {
      case MassProfile::Uniform:
        w[i] = 1;
        break;
      case MassProfile::Random:
        w[i] = static_cast<long>(rng.uniform_int(1, 1 << 20));
        break;
      case MassProfile::Dirichlet: {
        double g = rng.gamma(0.5);
        long q = static_cast<long>(std::floor(g * 16777216.0));
        w[i] = allow_zero ? q : std::max(1L, q);
        break;
      }
    }
  }
  bool any = false;
  for (const auto& x : w)
    if (x != 0) any = true;
  if (!any) w[0] = 1;
  return w;
}

}  // namespace

DiscreteMeasure random_measure(std::uint64_t seed, std::size_t n_atoms, const Rational& span, MassProfile profile) {
  if (n_atoms < 1) throw std::invalid_argument("random_measure needs at least one atom");
  if (span < 0) throw std::invalid_argument("random_measure: negative span");
  Rng rng(seed);
  const std::int64_t slots = static_cast<std::int64_t>(64 * n_atoms);
  // Floyd's algorithm for a uniform n-subset of {0..slots}.
  std::vector<std::int64_t> chosen;
  std::vector<bool> used(static_cast<std::size_t>(slots) + 1, false);
  for (std::int64_t j = slots + 1 - static_cast<std::int64_t>(n_atoms); j <= slots; ++j) {
    std::int64_t t = rng.uniform_int(0, j);
    if (used[static_cast<std::size_t>(t)]) t = j;
    used[static_cast<std::size_t>(t)] = true;
    chosen.push_back(t);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Integer> w = profile_weights(rng, n_atoms, profile, false);
  Integer W = 0;
  for (const auto& x : w) W += x;
  // position = t·span/slots
  Integer D = span.get_den() * Integer(static_cast<long>(slots));
  std::vector<Integer> coords;
  for (auto t : chosen) coords.push_back(Integer(static_cast<long>(t)) * span.get_num());
  if (span == 0) {
    coords.assign(1, Integer(0));
    w.assign(1, Integer(1));
    W = 1;
    D = 1;
  }
  return MeasureBuilder::make(nullptr, 1, D, std::move(coords), W, std::move(w), span != 0);
}

DiscreteMeasure random_integer_measure(Rng& rng, long offset, std::size_t n, MassProfile profile) {
  if (n < 1) throw std::invalid_argument("random_integer_measure needs n ≥ 1");
  std::vector<Integer> w = profile_weights(rng, n, profile, true);
  Integer W = 0;
  for (const auto& x : w) W += x;
  std::vector<Integer> coords;
  for (std::size_t i = 0; i < n; ++i) coords.emplace_back(offset + static_cast<long>(i));
  return MeasureBuilder::make(nullptr, 1, Integer(1), std::move(coords), W, std::move(w), true);
}

}  // namespace bc
