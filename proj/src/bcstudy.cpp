#include "bc/bcstudy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bc {

namespace {

void check_lambda_p(const AlgebraicPtr& lambda, const Rational& p) {
  if (!lambda) throw std::invalid_argument("λ missing");
  if (lambda->compare(0) <= 0 || lambda->compare(1) >= 0) throw std::invalid_argument("λ must lie in (0, 1)");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie in (0, 1)");
}

DiscreteMeasure level(const AlgebraicPtr& lambda, const Rational& p, int l, int bound) {
  if (l < 0) throw std::invalid_argument("level must be ≥ 0");
  if (l > bound) throw ResourceLimit("level " + std::to_string(l) + " exceeds the enumeration bound " + std::to_string(bound));
  if (l == 0) return dirac(Position::rational(0));
  return level_measure(lambda, p, LevelInterval::standard(l), bound);
}

RationalInterval gap_of(const DiscreteMeasure& m) {
  if (m.size() < 2) return {Rational(0), Rational(0)};
  return min_gap(m);
}

nlohmann::json interval_json(const RationalInterval& r) {
  return {{"lo", to_fraction_string(r.lo)}, {"hi", to_fraction_string(r.hi)}, {"approx", static_cast<double>(to_ld(r.lo))}};
}

}  // namespace

long double log2_mahler_lo(const MahlerEnclosure& m) { return log2_ld(m.lo) - 1e-15L; }
long double log2_mahler_hi(const MahlerEnclosure& m) { return log2_ld(m.hi) + 1e-15L; }

// ---------------------------------------------------------------- h_estimate

HLambdaEstimate h_estimate(const AlgebraicPtr& lambda, const Rational& p, int l_max, int bound) {
  check_lambda_p(lambda, p);
  if (l_max < 1) throw std::invalid_argument("l_max must be ≥ 1");
  if (l_max > bound) throw ResourceLimit("l_max exceeds the enumeration bound");
  HLambdaEstimate est;
  est.lambda = lambda;
  est.p = p;
  est.mahler = mahler_measure(lambda->minpoly());
  est.levels.resize(static_cast<std::size_t>(l_max));
  parallel_for(static_cast<std::size_t>(l_max), [&](std::size_t i) {
    int l = static_cast<int>(i) + 1;
    auto m = level(lambda, p, l, bound);
    LevelStat& s = est.levels[i];
    s.l = l;
    s.H = shannon(m);
    s.ratio = s.H.value / l;
    s.atoms = m.size();
    s.min_gap = gap_of(m);
    s.diameter = m.size() > 1 ? m.approx(m.size() - 1) - m.approx(0) : 0;
  });
  return est;
}

nlohmann::json HLambdaEstimate::to_json() const {
  nlohmann::json j;
  j["lambda_minpoly"] = lambda->minpoly().to_string();
  j["p"] = to_fraction_string(p);
  j["mahler"] = {{"lo", to_fraction_string(mahler.lo)}, {"hi", to_fraction_string(mahler.hi)}};
  j["levels"] = nlohmann::json::array();
  for (const auto& s : levels)
    j["levels"].push_back({{"l", s.l},
                           {"H", static_cast<double>(s.H.value)},
                           {"H_err", static_cast<double>(s.H.abs_error)},
                           {"ratio", static_cast<double>(s.ratio)},
                           {"atoms", s.atoms},
                           {"min_gap", interval_json(s.min_gap)}});
  return j;
}

std::string HLambdaEstimate::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "l,H,ratio,atoms,min_gap\n";
  for (const auto& s : levels)
    os << s.l << ',' << static_cast<double>(s.H.value) << ',' << static_cast<double>(s.ratio) << ',' << s.atoms << ','
       << static_cast<double>(to_ld(s.min_gap.lo)) << '\n';
  return os.str();
}

// ---------------------------------------------------------------- h_bounds_check

VerificationReport h_bounds_check(const HLambdaEstimate& est, long double c0) {
  if (est.levels.size() < 3) throw std::invalid_argument("h_bounds_check needs at least three levels");
  VerificationReport rep;
  rep.rule = "h-bounds";
  const LevelStat& last = est.levels.back();
  const long double lm_lo = log2_mahler_lo(est.mahler), lm_hi = log2_mahler_hi(est.mahler);
  const int d = est.lambda->degree();

  // Upper bound with the finite-level slack; C_fit from the observed gaps.
  long double log_cfit = 0;
  for (const auto& s : est.levels) {
    if (s.atoms < 2) continue;
    long double count_bound = std::log2(s.diameter / to_ld(s.min_gap.lo) + 1);
    long double model = s.l * lm_lo + d * std::log2(static_cast<long double>(s.l));
    log_cfit = std::max(log_cfit, count_bound - model);
  }
  const long double lN = static_cast<long double>(last.l);
  const long double slack = (d * std::log2(lN) + log_cfit) / lN;
  const long double upper = std::min(1.0L, lm_hi) + slack;
  const long double tol = last.H.abs_error / lN + 1e-12L;
  bool upper_ok = last.ratio <= upper + tol;

  bool lower_applies = est.p == Rational(1, 2);
  long double lower = c0 * std::min(lm_hi, 1.0L);
  bool lower_ok = !lower_applies || last.ratio >= lower - tol;

  bool trend_ok = true;
  for (std::size_t i = 1; i < est.levels.size(); ++i)
    if (est.levels[i].ratio > est.levels.front().ratio + 1e-12L) trend_ok = false;

  rep.lhs = {last.ratio, tol};
  rep.rhs = {upper, 0};
  rep.margin = std::min(upper - last.ratio, lower_applies ? last.ratio - lower : upper - last.ratio);
  rep.pass = upper_ok && lower_ok && trend_ok;
  std::ostringstream note;
  note.precision(6);
  note << "upper=min(1,logM)+slack with slack=" << static_cast<double>(slack) << " (heuristic C_fit, not rigorous)";
  note << "; lower=" << (lower_applies ? std::to_string(static_cast<double>(lower)) : std::string("n/a (p != 1/2)"));
  note << "; trend " << (trend_ok ? "non-increasing" : "increasing");
  rep.note = note.str();
  return rep;
}

// ---------------------------------------------------------------- separation

SeparationReport separation_check(const AlgebraicPtr& lambda, const Rational& p, int l, int bound) {
  check_lambda_p(lambda, p);
  if (l < 1) throw std::invalid_argument("separation_check needs l ≥ 1");
  auto m = level(lambda, p, l, bound);
  SeparationReport r;
  r.l = l;
  r.atoms = m.size();
  r.min_gap = gap_of(m);
  auto M = mahler_measure(lambda->minpoly());
  r.log_mahler = 0.5L * (log2_mahler_lo(M) + log2_mahler_hi(M));
  r.garsia_rate = r.log_mahler + lambda->degree() * std::log2(static_cast<long double>(l)) / l;
  r.distinct = r.min_gap.lo > 0 || (m.size() == 1);
  if (m.size() > 1 && r.min_gap.lo > 0) r.rate = -log2_ld(r.min_gap.lo) / l;
  r.window_applies = l >= 15;
  r.in_window = std::fabs(r.rate - r.log_mahler) <= 0.15L;
  r.pass = r.distinct && (!r.window_applies || r.in_window);
  return r;
}

nlohmann::json SeparationReport::to_json() const {
  return {{"l", l},
          {"atoms", atoms},
          {"min_gap", interval_json(min_gap)},
          {"rate", static_cast<double>(rate)},
          {"log_mahler", static_cast<double>(log_mahler)},
          {"garsia_rate", static_cast<double>(garsia_rate)},
          {"distinct", distinct},
          {"window_applies", window_applies},
          {"in_window", in_window},
          {"pass", pass}};
}

// ---------------------------------------------------------------- full entropy scale

VerificationReport full_entropy_scale_check(const AlgebraicPtr& lambda, const Rational& p, int l, const Rational& alpha,
                                            int bound) {
  check_lambda_p(lambda, p);
  if (alpha <= 0) throw std::invalid_argument("α must be positive");
  auto M = mahler_measure(lambda->minpoly());
  if (!(alpha * M.hi < 1)) throw std::invalid_argument("α < 1/M could not be certified");
  auto m = level(lambda, p, l, bound);
  VerificationReport rep;
  rep.rule = "full-entropy-scale";
  Rational r = pow_rat(alpha, l);
  auto gap = gap_of(m);
  long double margin = m.size() < 2 ? INFINITY : to_ld(gap.lo) - to_ld(r);
  if (m.size() >= 2 && gap.lo <= r) {
    rep.hypothesis_satisfied = false;
    rep.pass = true;
    rep.margin = margin;
    rep.note = "min_gap ≤ α^l; equality not implied at this level";
    return rep;
  }
  rep.lhs = scale_entropy(m, r);
  rep.rhs = shannon(m);
  settle_equality(rep, 1e-9L);
  rep.note = "gap margin " + std::to_string(static_cast<double>(margin));
  return rep;
}

// ---------------------------------------------------------------- factorization

namespace {

/// Coefficient vector of an endpoint in λ's basis.
std::vector<Rational> endpoint_coeffs(const AlgebraicNumber& lam, const LevelEndpoint& e) {
  std::vector<Rational> c;
  if (e.is_power) return lam.power_coeffs(e.power);
  c.assign(static_cast<std::size_t>(std::max(1, lam.degree())), Rational(0));
  c[0] = e.value;
  return c;
}

int compare_endpoints(const AlgebraicNumber& lam, const LevelEndpoint& a, const LevelEndpoint& b) {
  if (auto q = lam.exact_value()) {
    auto val = [&](const LevelEndpoint& e) { return e.is_power ? pow_rat(*q, e.power) : e.value; };
    Rational d = val(a) - val(b);
    return sgn(d);
  }
  auto ca = endpoint_coeffs(lam, a), cb = endpoint_coeffs(lam, b);
  for (std::size_t j = 0; j < ca.size(); ++j) ca[j] -= cb[j];
  return lam.sign_of(ca);
}

/// hi of one interval sits strictly above lo of the other, or touches it with both closed.
bool reaches(const AlgebraicNumber& lam, const LevelEndpoint& hi, const LevelEndpoint& lo) {
  int c = compare_endpoints(lam, hi, lo);
  return c > 0 || (c == 0 && hi.closed && lo.closed);
}

bool overlap(const AlgebraicNumber& lam, const LevelInterval& a, const LevelInterval& b) {
  return reaches(lam, a.hi, b.lo) && reaches(lam, b.hi, a.lo);
}

}  // namespace

VerificationReport factorization_check(const AlgebraicPtr& lambda, const Rational& p, const std::vector<LevelInterval>& parts,
                                       int L, int bound) {
  check_lambda_p(lambda, p);
  if (L < 0) throw std::invalid_argument("level must be ≥ 0");
  if (L > bound) throw ResourceLimit("level exceeds the enumeration bound");
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t k = i + 1; k < parts.size(); ++k)
      if (overlap(*lambda, parts[i], parts[k]))
        throw std::invalid_argument("intervals " + std::to_string(i) + " and " + std::to_string(k) + " overlap");

  std::vector<char> used(static_cast<std::size_t>(L), 0);
  DiscreteMeasure rhs = dirac(Position::rational(0));
  std::ostringstream note;
  for (const auto& I : parts) {
    LevelInterval cut = I;
    LevelEndpoint floor_end = LevelEndpoint::lambda_power(L, false);
    int c = compare_endpoints(*lambda, I.lo, floor_end);
    if (c < 0 || (c == 0 && I.lo.closed)) cut.lo = floor_end;
    std::vector<int> idx;
    if (compare_endpoints(*lambda, cut.hi, cut.lo) > 0 || (cut.hi.closed && cut.lo.closed))
      for (int n : level_indices(*lambda, cut, bound))
        if (n < L) idx.push_back(n);
    for (int n : idx) used[static_cast<std::size_t>(n)] = 1;
    rhs = convolve(rhs, level_measure_indices(lambda, p, idx));
    note << idx.size() << ' ';
  }
  std::vector<int> rest, all;
  for (int n = 0; n < L; ++n) {
    all.push_back(n);
    if (!used[static_cast<std::size_t>(n)]) rest.push_back(n);
  }
  rhs = convolve(rhs, level_measure_indices(lambda, p, rest));
  auto lhs = level_measure_indices(lambda, p, all);

  VerificationReport rep;
  rep.rule = "factorization";
  rep.lhs = shannon(lhs);
  rep.rhs = shannon(rhs);
  rep.pass = lhs == rhs;
  rep.margin = rep.pass ? 0 : -std::fabs(rep.lhs.value - rep.rhs.value);
  rep.note = "indices per part: " + note.str() + "remainder " + std::to_string(rest.size()) +
             (rep.pass ? "; atom-exact equality" : "; measures differ");
  return rep;
}

// ---------------------------------------------------------------- decay

DecayProfile decay_profile(const AlgebraicPtr& lambda, const Rational& p, int L, int n_max, int bound) {
  check_lambda_p(lambda, p);
  if (n_max < 1) throw std::invalid_argument("n_max must be ≥ 1");
  auto m = level(lambda, p, L, bound);
  DecayProfile d;
  d.L = L;
  d.min_gap = gap_of(m);
  Rational finest = pow_rat(Rational(1, 2), n_max);
  if (m.size() > 1 && finest < 8 * d.min_gap.hi)
    throw std::invalid_argument("scale window violation: 2^-n_max < 8·min_gap");
  d.n.resize(static_cast<std::size_t>(n_max));
  d.values.resize(d.n.size());
  d.errors.resize(d.n.size());
  parallel_for(d.n.size(), [&](std::size_t i) {
    int n = static_cast<int>(i) + 1;
    Rational r = pow_rat(Rational(1, 2), n);
    auto v = cond_entropy(m, r, 2 * r);
    d.n[i] = n;
    d.values[i] = v.value;
    d.errors[i] = v.abs_error;
  });
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < d.n.size(); ++i) {
    long double x = 1.0L / (static_cast<long double>(d.n[i]) * d.n[i]);
    sxy += x * (1 - d.values[i]);
    sxx += x * x;
  }
  d.fit_C = sxx > 0 ? sxy / sxx : 0;
  d.h_est = L > 0 ? shannon(m).value / L : 0;
  Interval lam = lambda->enclosure(128);
  long double log_lam = std::log2(lam.mid_ld());
  d.dim_estimate = std::min(-d.h_est / log_lam, 1.0L);
  return d;
}

nlohmann::json DecayProfile::to_json() const {
  nlohmann::json j;
  j["L"] = L;
  j["n"] = n;
  j["values"] = nlohmann::json::array();
  j["errors"] = nlohmann::json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    j["values"].push_back(static_cast<double>(values[i]));
    j["errors"].push_back(static_cast<double>(errors[i]));
  }
  j["fit_C"] = static_cast<double>(fit_C);
  j["h_est"] = static_cast<double>(h_est);
  j["dim_estimate"] = static_cast<double>(dim_estimate);
  j["dim_note"] = "diagnostic: uses the level-L ratio in place of the limit";
  j["min_gap"] = interval_json(min_gap);
  return j;
}

std::string DecayProfile::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "n,value,error\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << n[i] << ',' << static_cast<double>(values[i]) << ',' << static_cast<double>(errors[i]) << '\n';
  return os.str();
}

}  // namespace bc
