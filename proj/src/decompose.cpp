#include "bc/decompose.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace bc {

int sign_of_gap_minus(const DiscreteMeasure& mu, std::size_t i, std::size_t j, const Rational& c) {
  if (mu.is_rational()) return sgn(Rational(mu.position_rational(j) - mu.position_rational(i) - c));
  long double d = mu.approx(j) - mu.approx(i) - to_ld(c);
  long double err = mu.approx_error(i) + mu.approx_error(j) + std::fabs(to_ld(c)) * 0x1p-60L + 0x1p-16000L;
  if (d > err * 2) return 1;
  if (d < -err * 2) return -1;
  std::vector<Rational> v(static_cast<std::size_t>(mu.dim()));
  for (int k = 0; k < mu.dim(); ++k) v[static_cast<std::size_t>(k)] = Rational(mu.coord(j, k) - mu.coord(i, k), mu.pos_den());
  v[0] -= c;
  for (auto& x : v) x.canonicalize();
  return mu.owner()->sign_of(v);
}

// ---------------------------------------------------------------- L² / L¹

L2L1Split l2_l1_split(const DiscreteMeasure& mu, long N) {
  if (N < 1) throw std::invalid_argument("l2_l1_split: N must be positive");
  if (mu.empty() || mu.total_mass() != 1) throw std::invalid_argument("l2_l1_split: μ must be a probability measure");
  if (!mu.integer_supported() || mu.position_rational(0) < 1 || mu.position_rational(mu.size() - 1) > N)
    throw std::invalid_argument("l2_l1_split: support must lie in [1, N] ∩ ℤ");
  const Rational inv(1, N), cap(2, N);
  std::vector<std::pair<Rational, Rational>> fa, ga;
  L2L1Split s;
  s.N = N;
  s.f_dist_sq = Rational(N - static_cast<long>(mu.size()), 1) * inv * inv;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Rational x = mu.position_rational(i), m = mu.mass(i);
    Rational f = m <= cap ? m : inv;
    Rational g = m - f;
    fa.emplace_back(x, f);
    if (g > 0) ga.emplace_back(x, g);
    s.f_dist_sq += (f - inv) * (f - inv);
    if (f > s.f_sup) s.f_sup = f;
    s.f_l1 += f;
    s.g_l1 += g;
  }
  s.f = DiscreteMeasure::from_rational_atoms(fa);
  s.g = DiscreteMeasure::from_rational_atoms(ga);
  EntropyValue H = shannon(mu);
  s.missing_entropy = std::log2(static_cast<long double>(N)) - H.value;
  const long double slack = 1e-12L + H.abs_error * 2;
  std::ostringstream err;
  if (to_ld(s.f_dist_sq) > 2 * s.missing_entropy / N + slack) err << "‖f−χ_N‖₂² bound; ";
  if (s.f_sup > cap) err << "‖f‖∞ bound; ";
  if (s.f_l1 > 1) err << "‖f‖₁ bound; ";
  if (to_ld(s.g_l1) > 2 * s.missing_entropy + slack) err << "‖g‖₁ bound; ";
  if (add(s.f, s.g) != mu) err << "reconstruction; ";
  if (!err.str().empty()) throw std::logic_error("l2_l1_split violated: " + err.str());
  return s;
}

VerificationReport l2_entropy_bound(const DiscreteMeasure& mu, long M, long double tol) {
  if (M < 1) throw std::invalid_argument("l2_entropy_bound: M must be positive");
  if (mu.empty() || mu.total_mass() != 1) throw std::invalid_argument("l2_entropy_bound: μ must be a probability measure");
  if (!mu.integer_supported() || mu.position_rational(0) < 1 || mu.position_rational(mu.size() - 1) > M)
    throw std::invalid_argument("l2_entropy_bound: support must lie in [1, M] ∩ ℤ");
  const Rational inv(1, M);
  Rational d = Rational(M - static_cast<long>(mu.size()), 1) * inv * inv;
  for (std::size_t i = 0; i < mu.size(); ++i) d += (mu.mass(i) - inv) * (mu.mass(i) - inv);
  VerificationReport rep;
  rep.rule = "l2-entropy";
  EntropyValue H = shannon(mu);
  rep.lhs = {std::log2(static_cast<long double>(M)) - H.value, H.abs_error + 0x1p-60L};
  rep.rhs = {to_ld(Rational(2 * M * d)), 0x1p-60L};
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- pairs

std::vector<Rational> BernoulliPair::center() const {
  std::vector<Rational> c(a.coeffs.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = (a.coeffs[k] + b.coeffs[k]) / 2;
  return c;
}

std::vector<Rational> BernoulliPair::distance() const {
  std::vector<Rational> c(a.coeffs.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = b.coeffs[k] - a.coeffs[k];
  return c;
}

DiscreteMeasure BernoulliPair::measure() const { return DiscreteMeasure::from_atoms({a, b}, {mass_each, mass_each}); }

DiscreteMeasure BernoulliDecomposition::reconstruct() const {
  DiscreteMeasure m = residual;
  for (const auto& p : pairs) m = add(m, p.measure());
  return m;
}

nlohmann::json BernoulliDecomposition::to_json() const {
  nlohmann::json j;
  j["residual"] = residual.to_json();
  j["r"] = to_fraction_string(r);
  j["extracted"] = to_fraction_string(extracted);
  j["hypothesis"] = hypothesis;
  j["h"] = static_cast<double>(h);
  j["bound"] = static_cast<double>(bound);
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json e;
    auto coeffs = [](const std::vector<Rational>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& x : v) a.push_back(to_fraction_string(x));
      return a;
    };
    e["a"] = coeffs(p.a.coeffs);
    e["b"] = coeffs(p.b.coeffs);
    e["center"] = coeffs(p.center());
    e["distance"] = coeffs(p.distance());
    e["mass"] = to_fraction_string(p.mass());
    ps.push_back(e);
  }
  j["pairs"] = ps;
  return j;
}

namespace {

// In-band test for atoms i < j: r/2 ≤ x_j − x_i ≤ 2r. Returns -1 if too close,
// +1 if too far, 0 if in band.
int band_position(const DiscreteMeasure& mu, std::size_t i, std::size_t j, const Rational& r) {
  if (sign_of_gap_minus(mu, i, j, r / 2) < 0) return -1;
  if (sign_of_gap_minus(mu, i, j, 2 * r) > 0) return 1;
  return 0;
}

}  // namespace

bool has_in_band_pair(const DiscreteMeasure& mu, const Rational& r) {
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = i + 1; j < mu.size(); ++j) {
      int b = band_position(mu, i, j, r);
      if (b == 0) return true;
      if (b > 0) break;
    }
  return false;
}

BernoulliDecomposition bernoulli_extract(const DiscreteMeasure& mu, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("bernoulli_extract: r must be positive");
  const std::size_t n = mu.size();
  BernoulliDecomposition dec;
  dec.r = r;
  std::vector<Rational> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = mu.mass(i);
  // band[i] lists the in-band partners j > i; positions never change.
  std::vector<std::vector<std::size_t>> band(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      int b = band_position(mu, i, j, r);
      if (b > 0) break;
      if (b == 0) band[i].push_back(j);
    }
  for (;;) {
    std::size_t bi = n, bj = n;
    long double best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mass[i] == 0) continue;
      for (std::size_t j : band[i]) {
        if (mass[j] == 0) continue;
        long double d = mu.approx(j) - mu.approx(i);
        bool take = bi == n;
        if (!take) {
          long double eps = 4 * (mu.approx_error(i) + mu.approx_error(j) + mu.approx_error(bi) + mu.approx_error(bj)) +
                            1e-18L * (1 + std::fabs(best));
          if (d < best - eps) {
            take = true;
          } else if (d <= best + eps) {
            // Exact comparison of x_j − x_i with x_bj − x_bi; equal keeps the leftmost.
            std::vector<Rational> diff(static_cast<std::size_t>(mu.dim()));
            for (int k = 0; k < mu.dim(); ++k)
              diff[static_cast<std::size_t>(k)] =
                  Rational(mu.coord(j, k) - mu.coord(i, k) - mu.coord(bj, k) + mu.coord(bi, k), mu.pos_den());
            for (auto& x : diff) x.canonicalize();
            take = (mu.is_rational() ? sgn(diff[0]) : mu.owner()->sign_of(diff)) < 0;
          }
        }
        if (take) {
          bi = i;
          bj = j;
          best = d;
        }
      }
    }
    if (bi == n) break;
    Rational m = std::min(mass[bi], mass[bj]);
    dec.pairs.push_back({mu.position(bi), mu.position(bj), m});
    mass[bi] -= m;
    mass[bj] -= m;
    dec.extracted += 2 * m;
  }
  std::vector<Position> pos;
  std::vector<Rational> ms;
  for (std::size_t i = 0; i < n; ++i)
    if (mass[i] > 0) {
      pos.push_back(mu.position(i));
      ms.push_back(mass[i]);
    }
  dec.residual = DiscreteMeasure::from_atoms(pos, ms);
  if (mu.total_mass() == 1) {
    EntropyValue h = cond_entropy(mu, r, 2 * r);
    EntropyValue h2 = cond_entropy(mu, r / 2, r);
    dec.h = h.value;
    dec.hypothesis = h2.value <= 1.5L * h.value;
    long double hh = std::min(1.0L, std::max(0.0L, h.value));
    dec.bound = hh > 0 ? hh / (128.0L * (std::log2(1.0L / hh) + 1.0L)) : 0.0L;
    if (dec.hypothesis && to_ld(dec.extracted) < dec.bound - 1e-12L - h.abs_error)
      throw std::logic_error("bernoulli_extract: extracted mass below the 1/128 bound");
  }
  return dec;
}

Rational exhaustive_min_residual(const DiscreteMeasure& mu, const Rational& r) {
  const std::size_t n = mu.size();
  if (n > 12) throw ResourceLimit("exhaustive_min_residual: more than 12 atoms");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (band_position(mu, i, j, r) == 0) pairs.emplace_back(i, j);
  std::map<std::vector<Rational>, Rational> memo;
  std::function<Rational(const std::vector<Rational>&)> go = [&](const std::vector<Rational>& m) -> Rational {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    Rational best = 0;
    for (const auto& x : m) best += x;
    for (auto [i, j] : pairs) {
      if (m[i] == 0 || m[j] == 0) continue;
      auto next = m;
      Rational t = std::min(m[i], m[j]);
      next[i] -= t;
      next[j] -= t;
      best = std::min(best, go(next));
    }
    memo.emplace(m, best);
    return best;
  };
  std::vector<Rational> m0(n);
  for (std::size_t i = 0; i < n; ++i) m0[i] = mu.mass(i);
  return go(m0);
}

// ---------------------------------------------------------------- clusters

std::optional<std::vector<Cluster>> support_clusters(const DiscreteMeasure& mu, const Rational& r0, const Rational& r1) {
  if (r0 <= 0 || r1 < 4 * r0) throw std::invalid_argument("support_clusters: need r0 > 0 and r1 ≥ 4·r0");
  std::vector<Cluster> out;
  if (mu.empty()) return out;
  Cluster cur{0, 0};
  for (std::size_t i = 1; i < mu.size(); ++i) {
    if (sign_of_gap_minus(mu, i - 1, i, r1) < 0) {
      cur.last = i;
    } else {
      out.push_back(cur);
      cur = {i, i};
    }
  }
  out.push_back(cur);
  for (const auto& c : out)
    if (sign_of_gap_minus(mu, c.first, c.last, r0) > 0) return std::nullopt;
  return out;
}

EntropyValue doubling_defect(const DiscreteMeasure& mu, const Rational& r) {
  EntropyValue a = cond_entropy(mu, r / 2, r), b = cond_entropy(mu, r, 2 * r);
  return {a.value - 2 * b.value, a.abs_error + 2 * b.abs_error};
}

}  // namespace bc
