#include "bc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bc {

using u128 = unsigned __int128;
using i128 = __int128;

namespace {

constexpr long double kUlp = 0x1p-63L;

bool fits_bits(const Integer& z, std::size_t bits) { return mpz_sizeinbase(z.get_mpz_t(), 2) <= bits; }

i128 to_i128(const Integer& z) {
  Integer a = abs(z);
  Integer hi = a >> 64;
  Integer lo = a - (hi << 64);
  i128 v = (static_cast<i128>(mpz_get_ui(hi.get_mpz_t())) << 64) | static_cast<i128>(mpz_get_ui(lo.get_mpz_t()));
  return sgn(z) < 0 ? -v : v;
}

Integer to_integer(const Integer& z) { return z; }
Integer to_integer(i128 v) {
  bool neg = v < 0;
  u128 a = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
  Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(a >> 64)));
  Integer r = (hi << 64) + Integer(static_cast<unsigned long>(static_cast<std::uint64_t>(a)));
  return neg ? Integer(-r) : r;
}

u128 to_u128(const Integer& z) { return static_cast<u128>(to_i128(z)); }

// Masses as u128 integer weights over a long double denominator. Exact when
// the mass denominator is below 2^124; otherwise rounded to a 2^-100 grid.
struct Weights {
  std::vector<u128> w;
  long double W = 1;
  u128 total = 0;
  long double quant_err = 0;
};

Weights weights_of(const DiscreteMeasure& mu) {
  Weights r;
  const std::size_t n = mu.size();
  r.w.resize(n);
  Integer S = 0;
  for (const auto& x : mu.weights()) S += x;
  if (fits_bits(mu.mass_den(), 124) && fits_bits(S, 124)) {
    for (std::size_t i = 0; i < n; ++i) r.w[i] = to_u128(mu.weight(i));
    r.W = to_ld(mu.mass_den());
  } else {
    // floor(w·2^100 / W)
    Integer scale = Integer(1) << 100;
    for (std::size_t i = 0; i < n; ++i) {
      Integer q = mu.weight(i) * scale / mu.mass_den();
      if (!fits_bits(q, 124)) throw std::overflow_error("total mass too large for entropy accumulation");
      r.w[i] = to_u128(q);
    }
    r.W = 0x1p100L;
    r.quant_err = static_cast<long double>(n) * 0x1p-92L;
  }
  for (auto x : r.w) r.total += x;
  return r;
}

// ψ(w) = (w/W)·log2(w/W)
struct Psi {
  long double inv;
  explicit Psi(long double W) : inv(1.0L / W) {}
  long double operator()(u128 w) const {
    if (w == 0) return 0.0L;
    long double m = static_cast<long double>(w) * inv;
    return m * std::log2(m);
  }
};

struct SweepPlan {
  std::vector<std::uint32_t> bucket;   // initial bucket of each atom (moves to bucket + 1 at its event)
  std::size_t nbuckets = 0;
  std::vector<std::uint32_t> order;    // atoms with events, by event time
  std::vector<std::size_t> group_end;  // exclusive ends of equal-time groups in order
  std::vector<long double> seg_len;    // group_end.size() + 1 lengths summing to 1
};

EntropyValue run_sweep(const Weights& wt, const SweepPlan& plan) {
  Psi psi(wt.W);
  std::vector<u128> b(plan.nbuckets, 0);
  for (std::size_t i = 0; i < wt.w.size(); ++i) b[plan.bucket[i]] += wt.w[i];
  CompensatedSum T;
  for (auto x : b) T.add(psi(x));
  const long double top = psi(wt.total);
  CompensatedSum H;
  H.add(plan.seg_len[0] * (top - T.value()));
  std::size_t pos = 0;
  std::size_t ops = b.size();
  for (std::size_t g = 0; g < plan.group_end.size(); ++g) {
    for (; pos < plan.group_end[g]; ++pos) {
      std::uint32_t i = plan.order[pos];
      std::uint32_t from = plan.bucket[i], to = from + 1;
      u128 w = wt.w[i];
      T.add(-psi(b[from]) - psi(b[to]));
      b[from] -= w;
      b[to] += w;
      T.add(psi(b[from]) + psi(b[to]));
      ops += 4;
    }
    H.add(plan.seg_len[g + 1] * (top - T.value()));
  }
  EntropyValue v;
  v.value = H.value();
  v.abs_error = static_cast<long double>(ops + plan.seg_len.size()) * 8 * kUlp + wt.quant_err;
  return v;
}

// Assigns dense bucket ids to a nondecreasing sequence of integer keys q_i so
// that q_i ↦ id and q_i + 1 ↦ id + 1.
template <class K>
void dense_buckets(const std::vector<K>& q, SweepPlan& plan) {
  const std::size_t n = q.size();
  plan.bucket.resize(n);
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      K diff = q[i] - q[i - 1];
      if (diff == 1)
        id += 1;
      else if (diff != 0)
        id += 2;
    }
    plan.bucket[i] = id;
  }
  plan.nbuckets = n ? id + 2 : 0;
}

template <class K>
void group_events(std::vector<std::pair<K, std::uint32_t>>& ev, const K& Q, SweepPlan& plan) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
  K prev = K(0);
  long double qinv = 1.0L / to_ld(to_integer(Q));
  for (std::size_t k = 0; k < ev.size(); ++k) {
    plan.order.push_back(ev[k].second);
    if (k + 1 == ev.size() || ev[k + 1].first != ev[k].first) {
      plan.seg_len.push_back(to_ld(to_integer(K(ev[k].first - prev))) * qinv);
      prev = ev[k].first;
      plan.group_end.push_back(plan.order.size());
    }
  }
  plan.seg_len.push_back(to_ld(to_integer(K(Q - prev))) * qinv);
}


SweepPlan plan_rational(const DiscreteMeasure& mu, const Rational& r) {
  SweepPlan plan;
  const std::size_t n = mu.size();
  const Integer& u = r.get_num();
  const Integer& v = r.get_den();
  Integer Q = mu.pos_den() * u;
  Integer cmax = 0;
  for (const auto& c : mu.coords())
    if (abs(c) > cmax) cmax = abs(c);
  const bool fast = mpz_sizeinbase(cmax.get_mpz_t(), 2) + mpz_sizeinbase(v.get_mpz_t(), 2) <= 120 && fits_bits(Q, 120);
  if (fast) {
    const i128 Qi = to_i128(Q), vi = to_i128(v);
    std::vector<i128> q(n);
    std::vector<std::pair<i128, std::uint32_t>> ev;
    for (std::size_t i = 0; i < n; ++i) {
      i128 x = to_i128(mu.coord(i)) * vi;
      i128 qq = x / Qi, rem = x % Qi;
      if (rem < 0) {
        rem += Qi;
        qq -= 1;
      }
      q[i] = qq;
      if (rem > 0) ev.emplace_back(Qi - rem, static_cast<std::uint32_t>(i));
    }
    dense_buckets(q, plan);
    group_events(ev, Qi, plan);
  } else {
    std::vector<Integer> q(n);
    std::vector<std::pair<Integer, std::uint32_t>> ev;
    for (std::size_t i = 0; i < n; ++i) {
      Integer x = mu.coord(i) * v;
      Integer rem;
      mpz_fdiv_qr(q[i].get_mpz_t(), rem.get_mpz_t(), x.get_mpz_t(), Q.get_mpz_t());
      if (rem > 0) ev.emplace_back(Integer(Q - rem), static_cast<std::uint32_t>(i));
    }
    dense_buckets(q, plan);
    group_events(ev, Q, plan);
  }
  return plan;
}

// Algebraic positions: y_i = x_i / r enclosed with MPFR; ties between event
// times are decided exactly, escalating precision otherwise.
SweepPlan plan_algebraic(const DiscreteMeasure& mu, const Rational& r) {
  const std::size_t n = mu.size();
  const int d = mu.dim();
  const AlgebraicNumber& lam = *mu.owner();
  auto exact_is = [&](std::size_t i, const Integer& m) {
    // x_i == m·r ?
    for (int j = 1; j < d; ++j)
      if (mu.coord(i, j) != 0) return false;
    return mu.coord(i, 0) * r.get_den() == m * r.get_num() * mu.pos_den();
  };
  auto exact_tie = [&](std::size_t i, std::size_t k, const Integer& m) {
    // x_i − x_k == m·r ?
    for (int j = 1; j < d; ++j)
      if (mu.coord(i, j) != mu.coord(k, j)) return false;
    return (mu.coord(i, 0) - mu.coord(k, 0)) * r.get_den() == m * r.get_num() * mu.pos_den();
  };
  for (mpfr_prec_t prec = 128; prec <= 8192; prec *= 2) {
    std::vector<Interval> pw;
    Interval lam_iv = lam.enclosure(prec);
    Interval acc = Interval(Rational(1), prec);
    for (int j = 0; j < d; ++j) {
      pw.push_back(acc);
      acc = acc * lam_iv;
    }
    Interval scale(Rational(1) / (Rational(mu.pos_den()) * r), prec);
    std::vector<Integer> q(n);
    std::vector<Interval> tau;
    std::vector<std::uint32_t> who;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      Interval y(Rational(0), prec);
      for (int j = 0; j < d; ++j) y = y + Interval(Rational(mu.coord(i, j)), prec) * pw[static_cast<std::size_t>(j)];
      y = y * scale;
      Integer flo, fhi;
      mpfr_get_z(flo.get_mpz_t(), y.lo(), MPFR_RNDD);
      mpfr_get_z(fhi.get_mpz_t(), y.hi(), MPFR_RNDD);
      if (flo != fhi) {
        if (fhi == flo + 1 && exact_is(i, fhi)) {
          q[i] = fhi;
          continue;
        }
        ok = false;
        break;
      }
      q[i] = flo;
      Interval fr = y - Interval(Rational(flo), prec);
      if (mpfr_zero_p(fr.lo()) && mpfr_zero_p(fr.hi())) continue;
      if (mpfr_sgn(fr.lo()) <= 0) {
        if (exact_is(i, flo)) continue;
        ok = false;
        break;
      }
      tau.push_back(Interval(Rational(1), prec) - fr);
      who.push_back(static_cast<std::uint32_t>(i));
    }
    if (!ok) continue;
    std::vector<std::size_t> idx(tau.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<long double> mid(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) mid[k] = tau[k].mid_ld();
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mid[a] < mid[b] || (mid[a] == mid[b] && who[a] < who[b]); });
    std::vector<bool> tie_with_prev(idx.size(), false);
    for (std::size_t k = 1; k < idx.size() && ok; ++k) {
      const Interval& a = tau[idx[k - 1]];
      const Interval& b = tau[idx[k]];
      if (certainly_less(a, b)) continue;
      std::size_t ia = who[idx[k - 1]], ib = who[idx[k]];
      // Equal fractional parts ⇔ x_a − x_b = (q_a − q_b)·r.
      if (exact_tie(ia, ib, q[ia] - q[ib])) {
        tie_with_prev[k] = true;
        continue;
      }
      ok = false;
    }
    if (!ok) continue;
    SweepPlan plan;
    dense_buckets(q, plan);
    long double prev = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      plan.order.push_back(who[idx[k]]);
      bool last = k + 1 == idx.size() || !tie_with_prev[k + 1];
      if (last) {
        long double t = mid[idx[k]];
        plan.seg_len.push_back(std::max(0.0L, t - prev));
        prev = std::max(prev, t);
        plan.group_end.push_back(plan.order.size());
      }
    }
    plan.seg_len.push_back(std::max(0.0L, 1.0L - prev));
    return plan;
  }
  throw std::runtime_error("scale_entropy: event order undecided at 8192 bits");
}

}  // namespace

EntropyValue shannon(const DiscreteMeasure& mu) {
  if (mu.empty()) return {};
  Weights wt = weights_of(mu);
  Psi psi(wt.W);
  CompensatedSum s;
  for (auto w : wt.w) s.add(-psi(w));
  s.add(psi(wt.total));
  return {s.value(), static_cast<long double>(mu.size() + 1) * 4 * kUlp + wt.quant_err};
}

EntropyValue scale_entropy(const DiscreteMeasure& mu, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("scale_entropy: r must be positive");
  if (mu.empty()) return {};
  Weights wt = weights_of(mu);
  SweepPlan plan = mu.is_rational() ? plan_rational(mu, r) : plan_algebraic(mu, r);
  return run_sweep(wt, plan);
}

EntropyValue scale_entropy_via_smoothing(const DiscreteMeasure& mu, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("scale_entropy_via_smoothing: r must be positive");
  if (mu.empty()) return {};
  Weights wt = weights_of(mu);
  Psi psi(wt.W);
  const std::size_t n = mu.size();
  // Events: atom i enters the window at x_i and leaves at x_i + r. Both
  // streams are already sorted; merge them, applying equal times together.
  std::vector<long double> enter(n), leave(n);
  std::vector<Integer> ienter, ileave;
  long double unit = 1;  // length of one coordinate unit relative to r
  const bool rational = mu.is_rational();
  if (rational) {
    // Coordinates over D·v: enter c_i·v, leave c_i·v + u·D; length/r = Δ/(D·u).
    const Integer& u = r.get_num();
    const Integer& v = r.get_den();
    Integer shift = u * mu.pos_den();
    ienter.resize(n);
    ileave.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ienter[i] = mu.coord(i) * v;
      ileave[i] = ienter[i] + shift;
    }
    unit = 1.0L / to_ld(shift);
  } else {
    Interval rr(r, 160);
    for (std::size_t i = 0; i < n; ++i) {
      Interval x = mu.position_enclosure(i, 160);
      enter[i] = (x / rr).mid_ld();
      leave[i] = enter[i] + 1.0L;
    }
  }
  auto less = [&](std::size_t a, std::size_t b) {  // enter[a] < leave[b]
    return rational ? ienter[a] < ileave[b] : enter[a] < leave[b];
  };
  auto eq = [&](std::size_t a, std::size_t b) { return rational ? ienter[a] == ileave[b] : enter[a] == leave[b]; };
  auto gap = [&](bool a_enter, std::size_t a, bool b_enter, std::size_t b) -> long double {
    if (rational) {
      const Integer& xa = a_enter ? ienter[a] : ileave[a];
      const Integer& xb = b_enter ? ienter[b] : ileave[b];
      return to_ld(Integer(xb - xa)) * unit;
    }
    return (b_enter ? enter[b] : leave[b]) - (a_enter ? enter[a] : leave[a]);
  };
  std::size_t i = 0, k = 0;
  u128 window = 0;
  CompensatedSum acc;
  bool have_prev = false;
  bool prev_enter = true;
  std::size_t prev_idx = 0;
  std::size_t ops = 0;
  while (i < n || k < n) {
    bool take_enter;
    if (i >= n)
      take_enter = false;
    else if (k >= n)
      take_enter = true;
    else
      take_enter = less(i, k) || eq(i, k);
    std::size_t cur = take_enter ? i : k;
    if (have_prev) {
      long double len = gap(prev_enter, prev_idx, take_enter, cur);
      if (len != 0 && window != 0) acc.add(len * psi(window));
      ++ops;
    }
    // Apply every event at this time.
    if (take_enter) {
      window += wt.w[i];
      ++i;
    } else {
      window -= wt.w[k];
      ++k;
    }
    have_prev = true;
    prev_enter = take_enter;
    prev_idx = cur;
  }
  EntropyValue v;
  v.value = psi(wt.total) - acc.value();
  v.abs_error = static_cast<long double>(ops + 2 * n) * 8 * kUlp + wt.quant_err + (rational ? 0 : n * 0x1p-56L);
  return v;
}

EntropyValue cond_entropy(const DiscreteMeasure& mu, const Rational& r1, const Rational& r2) {
  if (r1 == r2) return {};
  EntropyValue a = scale_entropy(mu, r1), b = scale_entropy(mu, r2);
  return {a.value - b.value, a.abs_error + b.abs_error};
}

EntropyValue z_block_entropy(const DiscreteMeasure& mu, long M) {
  if (M < 2) throw std::invalid_argument("z_block_entropy: M must be ≥ 2");
  if (mu.empty()) return {};
  if (!mu.integer_supported()) throw std::invalid_argument("z_block_entropy: measure must be supported on ℤ");
  Weights wt = weights_of(mu);
  Psi psi(wt.W);
  const std::size_t n = mu.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!mu.coord(i).fits_slong_p() || std::labs(mu.coord(i).get_si()) > (1L << 60))
      throw ResourceLimit("z_block_entropy: positions beyond 2^60");
  // In the a-domain atom i is present for a ∈ [n_i − M, n_i).
  std::size_t i = 0, k = 0;
  u128 S = 0;
  CompensatedSum T, acc;
  long prev = 0;
  bool have_prev = false;
  std::size_t ops = 0;
  while (i < n || k < n) {
    long ei = i < n ? mu.coord(i).get_si() - M : LONG_MAX;
    long ek = k < n ? mu.coord(k).get_si() : LONG_MAX;
    long a = std::min(ei, ek);
    if (have_prev && a > prev && S != 0) {
      acc.add(static_cast<long double>(a - prev) * (psi(S) - T.value()));
      ++ops;
    }
    while (i < n && mu.coord(i).get_si() - M == a) {
      S += wt.w[i];
      T.add(psi(wt.w[i]));
      ++i;
      ++ops;
    }
    while (k < n && mu.coord(k).get_si() == a) {
      S -= wt.w[k];
      T.add(-psi(wt.w[k]));
      ++k;
      ++ops;
    }
    prev = a;
    have_prev = true;
  }
  EntropyValue v;
  v.value = acc.value() / static_cast<long double>(M);
  v.abs_error = static_cast<long double>(ops + 1) * 8 * kUlp + wt.quant_err;
  return v;
}

EntropyValue hpm(const DiscreteMeasure& mu) {
  if (mu.empty()) return {};
  Weights wt = weights_of(mu);
  Psi psi(wt.W);
  u128 neg = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    int s;
    if (mu.is_rational()) {
      s = sgn(mu.coord(i));
    } else if (mu.approx(i) + mu.approx_error(i) < 0) {
      s = -1;
    } else if (mu.approx(i) - mu.approx_error(i) > 0) {
      s = 1;
    } else {
      s = mu.owner()->sign_of(mu.position_coeffs(i));
    }
    if (s < 0) neg += wt.w[i];
  }
  return {-psi(neg) - psi(wt.total - neg), 4 * kUlp + wt.quant_err};
}

EntropyValue garsia_diagnostic(const DiscreteMeasure& mu, const Rational& r) {
  EntropyValue h = scale_entropy(mu, r);
  return {-log2_ld(r) - h.value, h.abs_error + 4 * kUlp};
}

// ---------------------------------------------------------------- profiles

Rational dyadic_scale(const Rational& sigma) {
  Integer k;
  mpz_fdiv_q(k.get_mpz_t(), sigma.get_num_mpz_t(), sigma.get_den_mpz_t());
  Rational f = sigma - Rational(k);
  mpfr_t x;
  mpfr_init2(x, 160);
  mpfr_set_q(x, f.get_mpq_t(), MPFR_RNDN);
  mpfr_exp2(x, x, MPFR_RNDN);
  mpfr_mul_2ui(x, x, 63, MPFR_RNDN);
  Integer m;
  mpfr_get_z(m.get_mpz_t(), x, MPFR_RNDN);
  mpfr_clear(x);
  long e = k.get_si() - 63;
  Rational t = e >= 0 ? Rational(m << static_cast<unsigned long>(e)) : Rational(m, Integer(1) << static_cast<unsigned long>(-e));
  t.canonicalize();
  return t;
}

namespace {
long step_count(const Rational& step) {
  if (step <= 0 || step.get_num() != 1 || !step.get_den().fits_slong_p())
    throw std::invalid_argument("profile step must be 1/N for a positive integer N");
  return step.get_den().get_si();
}
}  // namespace

EntropyProfile entropy_profile(const DiscreteMeasure& mu, const Rational& sigma_lo, const Rational& sigma_hi,
                               const Rational& step) {
  if (sigma_hi < sigma_lo) throw std::invalid_argument("entropy_profile: empty σ range");
  const long N = step_count(step);
  Rational span = (sigma_hi - sigma_lo) / step;
  Integer J;
  mpz_cdiv_q(J.get_mpz_t(), span.get_num_mpz_t(), span.get_den_mpz_t());
  const std::size_t npts = static_cast<std::size_t>(J.get_si()) + 1;
  const std::size_t total = npts + static_cast<std::size_t>(N);
  EntropyProfile p;
  p.step = step;
  std::vector<Rational> sig(total), ts(total);
  for (std::size_t j = 0; j < total; ++j) {
    sig[j] = sigma_lo + step * static_cast<unsigned long>(j);
    ts[j] = dyadic_scale(sig[j]);
  }
  std::vector<EntropyValue> G(total);
  parallel_for(total, [&](std::size_t j) { G[j] = scale_entropy(mu, ts[j]); });
  for (std::size_t j = 0; j < npts; ++j) {
    p.sigma.push_back(sig[j]);
    p.t.push_back(ts[j]);
    p.values.push_back(G[j].value - G[j + static_cast<std::size_t>(N)].value);
    // 2^σ is approximated to 2^-62 relative; the 2-Lipschitz bound turns that into ≤ 2^-60 per value.
    p.errors.push_back(G[j].abs_error + G[j + static_cast<std::size_t>(N)].abs_error + 0x1p-58L);
  }
  for (const auto& g : G) p.scale_values.push_back(g.value);
  return p;
}

EntropyProfile make_profile(const Rational& sigma_lo, const Rational& step, std::vector<long double> values) {
  step_count(step);
  EntropyProfile p;
  p.step = step;
  for (std::size_t j = 0; j < values.size(); ++j) {
    p.sigma.push_back(sigma_lo + step * static_cast<unsigned long>(j));
    p.t.push_back(dyadic_scale(p.sigma.back()));
  }
  p.values = std::move(values);
  p.errors.assign(p.values.size(), 0.0L);
  return p;
}

std::string profile_to_csv(const EntropyProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "sigma,t,value,abs_error\n";
  for (std::size_t j = 0; j < p.values.size(); ++j)
    os << static_cast<double>(to_ld(p.sigma[j])) << "," << static_cast<double>(to_ld(p.t[j])) << ","
       << static_cast<double>(p.values[j]) << "," << static_cast<double>(p.errors[j]) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- level sets

namespace {

// A point x + e·ε with ε an infinitesimal.
struct HyperPoint {
  long double x;
  int e;
};
bool hp_less(const HyperPoint& a, const HyperPoint& b) { return a.x < b.x || (a.x == b.x && a.e < b.e); }

struct Piece {
  long double a, b;
  bool a_open, b_open;
};

// Maximal 1-separated subset of a union of intervals sorted by left endpoint.
long greedy_packing(const std::vector<Piece>& pieces) {
  long count = 0;
  std::optional<HyperPoint> last;
  for (const auto& pc : pieces) {
    for (;;) {
      HyperPoint cand{pc.a, pc.a_open ? 1 : 0};
      if (last) {
        HyperPoint need{last->x + 1.0L, last->e};
        if (hp_less(cand, need)) cand = need;
      }
      // Feasible if cand ≤ b (closed) or cand < b (open).
      HyperPoint bound{pc.b, 0};
      bool ok = pc.b_open ? hp_less(cand, bound) : !hp_less(bound, cand);
      if (!ok) break;
      last = cand;
      ++count;
    }
  }
  return count;
}

std::vector<Piece> union_clip(std::vector<Piece> v, long double lo, long double hi) {
  std::vector<Piece> out;
  for (auto p : v) {
    if (p.a < lo || (p.a == lo && p.a_open)) {
      p.a = lo;
      p.a_open = false;
    }
    if (p.b > hi || (p.b == hi && p.b_open)) {
      p.b = hi;
      p.b_open = false;
    }
    if (p.a > p.b || (p.a == p.b && (p.a_open || p.b_open))) continue;
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Piece& x, const Piece& y) { return x.a < y.a || (x.a == y.a && !x.a_open && y.a_open); });
  std::vector<Piece> merged;
  for (const auto& p : out) {
    if (!merged.empty()) {
      Piece& m = merged.back();
      bool touch = p.a < m.b || (p.a == m.b && !(p.a_open && m.b_open));
      if (touch) {
        if (p.b > m.b || (p.b == m.b && !p.b_open)) {
          m.b = p.b;
          m.b_open = p.b_open;
        }
        continue;
      }
    }
    merged.push_back(p);
  }
  return merged;
}

}  // namespace

LevelSetCount separated_level_set_count(const EntropyProfile& profile, long double alpha, const Rational& sigma2,
                                        const Rational& sigma1) {
  if (profile.values.empty()) throw std::invalid_argument("separated_level_set_count: empty profile");
  if (profile.step > Rational(1, 8)) throw std::invalid_argument("separated_level_set_count: grid step must be ≤ 1/8");
  if (sigma2 > sigma1) throw std::invalid_argument("separated_level_set_count: σ2 > σ1");
  if (profile.sigma.front() > sigma2 || profile.sigma.back() < sigma1)
    throw std::invalid_argument("separated_level_set_count: profile does not cover [σ2, σ1]");
  const long double theta = 1.0L - alpha;
  const long double L = profile.lipschitz;
  const long double lo = to_ld(sigma2), hi = to_ld(sigma1);
  std::vector<Piece> certain, possible_gaps;
  for (std::size_t j = 0; j < profile.values.size(); ++j) {
    long double s = to_ld(profile.sigma[j]);
    long double vlo = profile.values[j] - profile.errors[j];
    long double vhi = profile.values[j] + profile.errors[j];
    if (vlo > theta) {
      long double rad = (vlo - theta) / L;
      certain.push_back({s - rad, s + rad, true, true});
    }
    if (vhi <= theta) {
      long double rad = (theta - vhi) / L;
      possible_gaps.push_back({s - rad, s + rad, false, false});
    }
  }
  // Profiles with scale values also get the per-cell monotone/2-Lipschitz bounds.
  const bool cells = !profile.scale_values.empty();
  std::vector<Piece> possible_cells;
  if (cells) {
    const long double h = to_ld(profile.step);
    for (std::size_t j = 0; j + 1 < profile.values.size(); ++j) {
      long double s = to_ld(profile.sigma[j]);
      if (cell_lower_bound(profile, j) > theta) certain.push_back({s, s + h, false, false});
      if (cell_upper_bound(profile, j) > theta) possible_cells.push_back({s, s + h, false, false});
    }
  }
  LevelSetCount out;
  out.lo = greedy_packing(union_clip(certain, lo, hi));
  // Complement of the certainly-below set inside [lo, hi].
  auto gaps = union_clip(possible_gaps, lo, hi);
  std::vector<Piece> possible;
  long double cur = lo;
  bool cur_open = false;
  for (const auto& g : gaps) {
    if (g.a > cur || (g.a == cur && !cur_open && g.a_open)) possible.push_back({cur, g.a, cur_open, !g.a_open});
    cur = g.b;
    cur_open = !g.b_open;
  }
  if (cur < hi || (cur == hi && !cur_open)) possible.push_back({cur, hi, cur_open, false});
  std::vector<Piece> cleaned;
  for (const auto& p : possible)
    if (p.a < p.b || (p.a == p.b && !p.a_open && !p.b_open)) cleaned.push_back(p);
  if (cells) {
    // Intersect with the union of cells that may exceed θ.
    auto pc = union_clip(possible_cells, lo, hi);
    std::vector<Piece> both;
    for (const auto& a : cleaned)
      for (const auto& b : pc) {
        Piece x = a;
        if (b.a > x.a || (b.a == x.a && b.a_open)) {
          x.a = b.a;
          x.a_open = b.a_open;
        }
        if (b.b < x.b || (b.b == x.b && b.b_open)) {
          x.b = b.b;
          x.b_open = b.b_open;
        }
        if (x.a < x.b || (x.a == x.b && !x.a_open && !x.b_open)) both.push_back(x);
      }
    cleaned = union_clip(both, lo, hi);
  }
  out.hi = greedy_packing(cleaned);
  return out;
}

// ---------------------------------------------------------------- k-HE

std::string to_string(KHeStatus s) {
  switch (s) {
    case KHeStatus::Holds:
      return "HOLDS";
    case KHeStatus::Fails:
      return "FAILS";
    case KHeStatus::Undecided:
      return "UNDECIDED";
  }
  return "?";
}

long double cell_lower_bound(const EntropyProfile& p, std::size_t j) {
  const std::size_t N = static_cast<std::size_t>(p.step.get_den().get_si());
  if (p.scale_values.size() < j + N + 2) throw std::out_of_range("cell_lower_bound: profile has no scale values here");
  const long double h = to_ld(p.step);
  const auto& G = p.scale_values;
  const long double g0 = G[j], g1 = G[j + 1], gN = G[j + N], gN1 = G[j + N + 1];
  // For s = s_j + x, x ∈ [0, h]:
  //   H(2^s)      ≥ max(g1, g0 − 2x)
  //   H(2^{s+1})  ≤ min(gN, gN1 + 2(h − x))
  auto bound = [&](long double x) { return std::max(g1, g0 - 2 * x) - std::min(gN, gN1 + 2 * (h - x)); };
  long double best = std::min(bound(0), bound(h));
  long double x1 = std::clamp((g0 - g1) / 2, 0.0L, h);
  long double x2 = std::clamp(h - (gN - gN1) / 2, 0.0L, h);
  best = std::min({best, bound(x1), bound(x2)});
  long double err = p.errors[j] + (j + 1 < p.errors.size() ? p.errors[j + 1] : p.errors[j]);
  return best - 2 * err;
}

long double cell_upper_bound(const EntropyProfile& p, std::size_t j) {
  const std::size_t N = static_cast<std::size_t>(p.step.get_den().get_si());
  if (p.scale_values.size() < j + N + 2) throw std::out_of_range("cell_upper_bound: profile has no scale values here");
  const long double h = to_ld(p.step);
  const auto& G = p.scale_values;
  const long double g0 = G[j], g1 = G[j + 1], gN = G[j + N], gN1 = G[j + N + 1];
  auto bound = [&](long double x) { return std::min(g0, g1 + 2 * (h - x)) - std::max(gN1, gN - 2 * x); };
  long double x1 = std::clamp(h - (g0 - g1) / 2, 0.0L, h);
  long double x2 = std::clamp((gN - gN1) / 2, 0.0L, h);
  long double best = std::max({bound(0), bound(h), bound(x1), bound(x2)});
  long double err = p.errors[j] + (j + 1 < p.errors.size() ? p.errors[j + 1] : p.errors[j]);
  return best + 2 * err;
}

KHeResult k_he_check(const DiscreteMeasure& mu, const Rational& r, int k, int A, const Rational& step) {
  if (r <= 0 || r >= Rational(1, 16)) throw std::invalid_argument("k_he_check requires 0 < r < 2^-4");
  if (k < 0) throw std::invalid_argument("k_he_check: k must be ≥ 0");
  KHeResult res;
  const long double lr = log2_ld(r);
  const long double ll = std::log2(-lr);
  const long double lll = std::log2(ll);
  const long double W = static_cast<long double>(A) * (2.0L + lll - k) * ll;
  long double expo = k < 62 ? std::ldexp(1.0L, k) + 3.0L * k + A : INFINITY;
  res.threshold = 1.0L - std::exp2(-expo);
  res.log_lo = lr - W;
  res.log_hi = lr + W;
  if (W <= 0) {
    res.status = KHeStatus::Holds;
    res.vacuous = true;
    return res;
  }
  const long N = step_count(step);
  auto grid_floor = [&](long double s) { return Rational(Integer(std::to_string(static_cast<long long>(std::floor(s * N)))), Integer(N)); };
  Rational s_lo = grid_floor(res.log_lo);
  Rational s_hi = grid_floor(res.log_hi) + step;
  s_lo.canonicalize();
  s_hi.canonicalize();
  EntropyProfile p = entropy_profile(mu, s_lo, s_hi, step);
  res.certified_min = INFINITY;
  res.grid_min = INFINITY;
  const long double h = to_ld(step);
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    long double s = to_ld(p.sigma[j]);
    if (s >= res.log_lo && s <= res.log_hi) {
      res.grid_min = std::min(res.grid_min, p.values[j]);
      if (!res.witness_t && p.values[j] + p.errors[j] < res.threshold) res.witness_t = p.t[j];
    }
    if (j + 1 < p.values.size() && s + h >= res.log_lo && s <= res.log_hi)
      res.certified_min = std::min(res.certified_min, cell_lower_bound(p, j));
  }
  if (res.witness_t)
    res.status = KHeStatus::Fails;
  else if (res.certified_min >= res.threshold)
    res.status = KHeStatus::Holds;
  else
    res.status = KHeStatus::Undecided;
  return res;
}

}  // namespace bc
