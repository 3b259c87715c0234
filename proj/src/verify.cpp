#include "bc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bc {

namespace constants {
long double low_entropy_c_hypothesis(long double alpha) { return 1.0L / (1000.0L * std::log2(1.0L / alpha)); }
long double low_entropy_c_conclusion(long double alpha) { return alpha / (1e7L * std::log2(1.0L / alpha)); }
}  // namespace constants

// ---------------------------------------------------------------- Instance

nlohmann::json Instance::to_json() const {
  nlohmann::json j;
  j["measures"] = nlohmann::json::array();
  for (const auto& m : measures) j["measures"].push_back(m.to_json());
  j["scales"] = nlohmann::json::array();
  for (const auto& s : scales) j["scales"].push_back(to_fraction_string(s));
  j["ints"] = ints;
  j["params"] = nlohmann::json::array();
  for (const auto& s : params) j["params"].push_back(to_fraction_string(s));
  j["joint"] = nlohmann::json::array();
  for (const auto& t : joint)
    j["joint"].push_back({to_fraction_string(t[0]), to_fraction_string(t[1]), to_fraction_string(t[2])});
  return j;
}

Instance Instance::from_json(const nlohmann::json& j) {
  Instance in;
  if (j.contains("measures"))
    for (const auto& m : j.at("measures")) in.measures.push_back(DiscreteMeasure::from_json(m));
  if (j.contains("scales"))
    for (const auto& s : j.at("scales")) in.scales.push_back(parse_rational(s.get<std::string>()));
  if (j.contains("ints")) in.ints = j.at("ints").get<std::vector<long>>();
  if (j.contains("params"))
    for (const auto& s : j.at("params")) in.params.push_back(parse_rational(s.get<std::string>()));
  if (j.contains("joint"))
    for (const auto& t : j.at("joint"))
      in.joint.push_back({parse_rational(t.at(0).get<std::string>()), parse_rational(t.at(1).get<std::string>()),
                          parse_rational(t.at(2).get<std::string>())});
  return in;
}

std::string Instance::digest() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash_string(to_json().dump());
  return os.str();
}

// ---------------------------------------------------------------- helpers

namespace {

EntropyValue operator+(EntropyValue a, EntropyValue b) { return {a.value + b.value, a.abs_error + b.abs_error}; }
EntropyValue operator-(EntropyValue a, EntropyValue b) { return {a.value - b.value, a.abs_error + b.abs_error}; }
EntropyValue plus(EntropyValue a, long double c) { return {a.value + c, a.abs_error + std::fabs(c) * 1e-18L}; }
EntropyValue exact(long double v) { return {v, std::fabs(v) * 1e-18L}; }

constexpr long kUnit = 1L << 20;

void need(const Instance& in, std::size_t measures, std::size_t scales, std::size_t ints, std::size_t params,
          const char* rule) {
  if (in.measures.size() < measures || in.scales.size() < scales || in.ints.size() < ints || in.params.size() < params)
    throw std::invalid_argument(std::string("instance is missing fields for rule ") + rule);
}

VerificationReport start(const char* rule, const Instance& in) {
  VerificationReport r;
  r.rule = rule;
  r.digest = in.digest();
  return r;
}

VerificationReport vacuous(VerificationReport r, std::string why) {
  r.hypothesis_satisfied = false;
  r.pass = true;
  r.margin = 0;
  r.note = std::move(why);
  return r;
}

bool is_probability(const DiscreteMeasure& m) { return m.total_mass() == 1; }

Rational canon(Rational q) {
  q.canonicalize();
  return q;
}

Rational rand_ratio(Rng& rng, long lo, long hi, long den) { return canon(Rational(rng.uniform_int(lo, hi), den)); }

/// floor / ceil of x at 2^-bits resolution.
Rational ld_down(long double x, int bits = 40) {
  long double s = std::floor(std::ldexp(x, bits));
  std::ostringstream os;
  os << std::fixed << std::setprecision(0) << s;
  return canon(Rational(Integer(os.str()), pow_int(2, static_cast<unsigned long>(bits))));
}
Rational ld_up(long double x, int bits = 40) { return -ld_down(-x, bits); }

MassProfile pick_profile(Rng& rng) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return MassProfile::Uniform;
    case 1: return MassProfile::Random;
    default: return MassProfile::Dirichlet;
  }
}

DiscreteMeasure generic_measure(Rng& rng, const GeneratorConfig& cfg, const Rational& span) {
  std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(std::max<std::size_t>(cfg.max_atoms, 1))));
  return random_measure(rng.next(), n, span, pick_profile(rng));
}

/// Masses w_n/den on {offset, …, offset+N−1} with w_n = kUnit·(1 + eps·(lo + (hi−lo)·u)).
DiscreteMeasure near_uniform(Rng& rng, long offset, long N, long double eps, long double lo, long double hi, const Integer& den) {
  std::vector<Integer> coords, w;
  coords.reserve(static_cast<std::size_t>(N));
  w.reserve(static_cast<std::size_t>(N));
  for (long n = 0; n < N; ++n) {
    long double u = lo + (hi - lo) * static_cast<long double>(rng.uniform01());
    long v = std::lround(static_cast<long double>(kUnit) * (1.0L + eps * u));
    coords.emplace_back(offset + n);
    w.emplace_back(std::max(v, 0L));
  }
  return DiscreteMeasure::from_raw(nullptr, 1, Integer(1), std::move(coords), den, std::move(w));
}

DiscreteMeasure normalized(const DiscreteMeasure& m) { return scale_mass(m, 1 / m.total_mass()); }

long pick_N(Rng& rng, const GeneratorConfig& cfg, int min_exp = 1) {
  int lo = std::max(cfg.log2_n_min, min_exp), hi = std::max(cfg.log2_n_max, lo);
  return 1L << rng.uniform_int(lo, hi);
}

/// M = N / 2^j with M ≥ 2.
long pick_M(Rng& rng, long N) {
  int L = 0;
  while ((1L << (L + 1)) <= N) ++L;
  int j = static_cast<int>(rng.uniform_int(1, std::max(1, L - 1)));
  return std::max(2L, N >> j);
}

bool supported_in(const DiscreteMeasure& m, long a, long b) {
  if (!m.integer_supported()) return false;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.coord(i) < a || m.coord(i) > b) return false;
  return true;
}

/// Dense exact values on [1, N] as numerators over m.mass_den().
std::vector<Integer> dense_weights(const DiscreteMeasure& m, long lo, long hi) {
  std::vector<Integer> v(static_cast<std::size_t>(hi - lo + 1), Integer(0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    long n = m.coord(i).get_si();
    if (n >= lo && n <= hi) v[static_cast<std::size_t>(n - lo)] = m.weight(i);
  }
  return v;
}

Rational sup_norm(const DiscreteMeasure& m) {
  Integer best = 0;
  for (std::size_t i = 0; i < m.size(); ++i) best = std::max(best, m.weight(i));
  return canon(Rational(best, m.mass_den()));
}

/// ‖f − χ_N‖₂² for f on [1, N], χ_N = 1/N there.
Rational dist_sq_uniform(const DiscreteMeasure& f, long N) {
  Integer sq = 0;
  for (const auto& w : f.weights()) sq += w * w;
  Rational s = canon(Rational(sq, f.mass_den() * f.mass_den()));
  return s - 2 * f.total_mass() / N + Rational(1, N);
}

DiscreteMeasure window_restrict(const DiscreteMeasure& m, long N) {
  return restrict(m, RealInterval::closed(Rational(N / 2 + 1), Rational(3 * N / 2)));
}

/// log M·‖ρ‖₁ − H(ρ; 1|M).
EntropyValue missing_block_entropy(const DiscreteMeasure& rho, long M) {
  if (rho.empty()) return {0, 0};
  long double lm = std::log2(static_cast<long double>(M));
  return exact(lm * to_ld(rho.total_mass())) - cond_entropy(rho, 1, M);
}

bool z_block_setup_ok(long N, long M) { return N >= 2 && N % 2 == 0 && M >= 1 && N % M == 0; }

/// Outcome of "H(μ; s|2s) ≥ θ for every s with |log s − c| < W" on a grid of step 1/8.
enum class Window { Holds, Fails, Undecided };
Window window_check(const DiscreteMeasure& mu, long double c, long double W, long double theta) {
  const long N = 8;
  Rational s_lo(Integer(std::to_string(static_cast<long long>(std::floor((c - W) * N)))), Integer(N));
  Rational s_hi(Integer(std::to_string(static_cast<long long>(std::ceil((c + W) * N)))), Integer(N));
  s_lo.canonicalize();
  s_hi.canonicalize();
  EntropyProfile p = entropy_profile(mu, s_lo, s_hi, Rational(1, N));
  const long double h = 1.0L / N;
  long double cert = INFINITY;
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    long double s = to_ld(p.sigma[j]);
    if (s > c - W && s < c + W && p.values[j] + p.errors[j] < theta) return Window::Fails;
    if (j + 1 < p.values.size() && s + h > c - W && s < c + W) cert = std::min(cert, cell_lower_bound(p, j));
  }
  return cert >= theta ? Window::Holds : Window::Undecided;
}

// ---------------------------------------------------------------- R1

Instance gen_r1(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational r1 = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
  long N = rng.uniform_int(2, 8);
  Rational span = canon(r1 * N * rand_ratio(rng, 1, 16, 4));
  in.measures = {generic_measure(rng, cfg, span), generic_measure(rng, cfg, span)};
  in.scales = {canon(r1), canon(r1 * N)};
  return in;
}

VerificationReport check_r1(const Instance& in, long double tol) {
  need(in, 2, 2, 0, 0, "R1");
  auto rep = start("R1", in);
  const Rational &r1 = in.scales[0], &r2 = in.scales[1];
  if (!(r1 > 0 && r2 > r1) || canon(r2 / r1).get_den() != 1) return vacuous(rep, "r2/r1 is not an integer > 1");
  rep.lhs = cond_entropy(in.measures[0], r1, r2);
  rep.rhs = cond_entropy(convolve(in.measures[0], in.measures[1]), r1, r2);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R2

Instance gen_r2(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational r2 = rand_ratio(rng, 1, 32, rng.uniform_int(1, 32));
  Rational r1 = canon(r2 * rand_ratio(rng, 8, 80, 8));
  in.measures = {generic_measure(rng, cfg, canon(r1 * rand_ratio(rng, 1, 32, 4)))};
  in.scales = {r1, canon(r2)};
  return in;
}

VerificationReport check_r2(const Instance& in, long double tol) {
  need(in, 1, 2, 0, 0, "R2");
  auto rep = start("R2", in);
  const Rational &r1 = in.scales[0], &r2 = in.scales[1];
  if (!(r2 > 0 && r1 >= r2)) return vacuous(rep, "needs r1 ≥ r2 > 0");
  rep.lhs = cond_entropy(in.measures[0], r2, r1);
  rep.rhs = exact(2 * (log2_ld(r1) - log2_ld(r2)));
  rep.margin = std::min(rep.lhs.value, rep.rhs.value - rep.lhs.value);
  rep.pass = rep.margin >= -(tol + rep.lhs.abs_error + rep.rhs.abs_error);
  return rep;
}

// ---------------------------------------------------------------- R3

Instance gen_r3(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational r1 = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
  Rational r2 = canon(r1 * rand_ratio(rng, 16, 96, 8));
  auto X = generic_measure(rng, cfg, canon(r2 * rand_ratio(rng, 1, 16, 2)));
  std::vector<std::pair<Rational, Rational>> ys;
  for (std::size_t i = 0; i < X.size(); ++i) {
    Rational x = X.position_rational(i), m = X.mass(i);
    int parts = static_cast<int>(rng.uniform_int(1, 2));
    Rational first = parts == 1 ? m : canon(m * rand_ratio(rng, 1, 15, 16));
    ys.push_back({x + r1 * rand_ratio(rng, 0, 16, 16), first});
    if (parts == 2) ys.push_back({x + r1 * rand_ratio(rng, 0, 16, 16), m - first});
  }
  in.measures = {X, DiscreteMeasure::from_rational_atoms(ys)};
  in.scales = {canon(r1), r2};
  return in;
}

VerificationReport check_r3(const Instance& in, long double tol) {
  need(in, 2, 2, 0, 0, "R3");
  auto rep = start("R3", in);
  const Rational &r1 = in.scales[0], &r2 = in.scales[1];
  if (!(r1 > 0 && 2 * r1 <= r2)) return vacuous(rep, "needs 2 r1 ≤ r2");
  if (!admits_shift_coupling(in.measures[0], in.measures[1], r1)) return vacuous(rep, "no coupling with X ≤ Y ≤ X + r1");
  auto d = scale_entropy(in.measures[0], r2) - scale_entropy(in.measures[1], r2);
  rep.lhs = {std::fabs(d.value), d.abs_error};
  long double q = to_ld(canon(r1 / r2));
  rep.rhs = exact(2 * q * std::log2(1 / q));
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R4

Instance gen_r4(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational r2 = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
  Rational r1 = canon(r2 * (1 + rand_ratio(rng, 1, 64, 8)));
  Rational span = canon(r1 * rand_ratio(rng, 1, 16, 4));
  in.measures = {generic_measure(rng, cfg, span), generic_measure(rng, cfg, span)};
  in.scales = {canon(r2), r1};
  return in;
}

VerificationReport check_r4(const Instance& in, long double tol) {
  need(in, 2, 2, 0, 0, "R4");
  auto rep = start("R4", in);
  const Rational &r2 = in.scales[0], &r1 = in.scales[1];
  if (!(r2 > 0 && r1 > r2)) return vacuous(rep, "needs 0 < r2 < r1");
  long double q = to_ld(canon(r1 / r2));
  rep.lhs = plus(cond_entropy(in.measures[0], r2, r1), -2.0L / (std::log(2.0L) * (q - 1)));
  rep.rhs = cond_entropy(convolve(in.measures[0], in.measures[1]), r2, r1);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R5

Instance gen_r5(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  int k = static_cast<int>(rng.uniform_int(2, 4));
  long N = rng.uniform_int(2, 8);
  Rational r = rand_ratio(rng, 1, 16, rng.uniform_int(1, 8));
  Rational span = canon(r * rand_ratio(rng, 1, 16, 4));
  std::vector<long> parts(static_cast<std::size_t>(k));
  long total = 0;
  for (auto& p : parts) total += (p = rng.uniform_int(1, 16));
  for (int i = 0; i < k; ++i)
    in.measures.push_back(scale_mass(generic_measure(rng, cfg, span), Rational(parts[static_cast<std::size_t>(i)], total)));
  in.scales = {canon(r)};
  in.ints = {N};
  return in;
}

VerificationReport check_r5(const Instance& in, long double tol) {
  need(in, 1, 1, 1, 0, "R5");
  auto rep = start("R5", in);
  const Rational& r = in.scales[0];
  long N = in.ints[0];
  if (!(r > 0 && N >= 1)) return vacuous(rep, "needs r > 0 and N ≥ 1");
  Rational fine = canon(r / N);
  DiscreteMeasure sum = in.measures[0];
  EntropyValue parts = cond_entropy(in.measures[0], fine, r);
  for (std::size_t i = 1; i < in.measures.size(); ++i) {
    sum = add(sum, in.measures[i]);
    parts = parts + cond_entropy(in.measures[i], fine, r);
  }
  rep.lhs = parts;
  rep.rhs = cond_entropy(sum, fine, r);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R6

Instance gen_r6(std::uint64_t seed, const GeneratorConfig&) {
  Rng rng(seed);
  Instance in;
  for (int i = 0; i < 3; ++i)
    in.measures.push_back(normalized(
        random_integer_measure(rng, rng.uniform_int(-4, 4), static_cast<std::size_t>(rng.uniform_int(1, 10)), pick_profile(rng))));
  return in;
}

VerificationReport check_r6(const Instance& in, long double tol) {
  need(in, 3, 0, 0, 0, "R6");
  auto rep = start("R6", in);
  const auto &X = in.measures[0], &Y = in.measures[1], &Z = in.measures[2];
  auto XY = convolve(X, Y);
  rep.lhs = shannon(convolve(XY, Z)) + shannon(Y);
  rep.rhs = shannon(XY) + shannon(convolve(Y, Z));
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R7

Instance gen_r7(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  long N = 1L << std::max(cfg.log2_n_min, std::min(cfg.log2_n_max, 12));
  int L = 0;
  while ((1L << (L + 1)) <= N) ++L;
  long double eps1 = 0.3L * static_cast<long double>(rng.uniform01());
  long double eps2 = 0.3L * static_cast<long double>(rng.uniform01());
  in.measures = {normalized(near_uniform(rng, 1, N, eps1, -1, 1, Integer(1))),
                 normalized(near_uniform(rng, 1, N, eps2, -1, 1, Integer(1)))};
  in.scales = {pow_rat(2, (L - 3) / 2)};
  in.params = {rand_ratio(rng, 400, 490, 1000)};
  return in;
}

VerificationReport check_r7(const Instance& in, long double tol) {
  need(in, 2, 1, 0, 1, "R7");
  auto rep = start("R7", in);
  const Rational& r = in.scales[0];
  const Rational& a = in.params[0];
  if (!(r > 0 && a > 0 && a < Rational(1, 2))) return vacuous(rep, "needs r > 0 and 0 < α < 1/2");
  long double alpha = to_ld(a), la = std::log2(1 / alpha);
  long double W = 3 * la, c = log2_ld(r);
  for (const auto& m : {in.measures[0], in.measures[1]}) {
    Window w = window_check(m, c, W, 1 - alpha);
    if (w == Window::Fails) return vacuous(rep, "entropy below 1 − α inside the window");
    if (w == Window::Undecided) return vacuous(rep, "window hypothesis undecided at grid resolution");
  }
  rep.lhs = exact(1 - constants::kHighEntropy * la * la * la * alpha * alpha);
  rep.rhs = cond_entropy(convolve(in.measures[0], in.measures[1]), r, 2 * r);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- ℤ-measure families

/// Near-uniform on a random subinterval, or a Dirichlet measure on [1, N].
DiscreteMeasure z_family(Rng& rng, long N) {
  switch (rng.uniform_int(0, 2)) {
    case 0: {
      long len = std::max(1L, N * rng.uniform_int(4, 8) / 8);
      long off = rng.uniform_int(1, N - len + 1);
      return normalized(near_uniform(rng, off, len, 0.5L * static_cast<long double>(rng.uniform01()), -1, 1, Integer(1)));
    }
    case 1:
      return normalized(near_uniform(rng, 1, N, static_cast<long double>(rng.uniform01()), -1, 1, Integer(1)));
    default:
      return normalized(random_integer_measure(rng, 1, static_cast<std::size_t>(N), MassProfile::Dirichlet));
  }
}

// ---------------------------------------------------------------- R8

Instance gen_r8(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  long N = pick_N(rng, cfg);
  in.measures = {z_family(rng, N), z_family(rng, N)};
  in.ints = {N, pick_M(rng, N)};
  return in;
}

VerificationReport check_r8(const Instance& in, long double tol) {
  need(in, 2, 0, 2, 0, "R8");
  auto rep = start("R8", in);
  long N = in.ints[0], M = in.ints[1];
  if (!z_block_setup_ok(N, M)) return vacuous(rep, "needs 2|N and M|N");
  const auto &nu = in.measures[0], &nt = in.measures[1];
  if (!nu.integer_supported() || !nt.integer_supported() || !is_probability(nu) || !is_probability(nt))
    return vacuous(rep, "needs probability measures on ℤ");
  long double lm = std::log2(static_cast<long double>(M)), ln = std::log2(static_cast<long double>(N));
  rep.lhs = plus(EntropyValue{0, 0} - cond_entropy(convolve(nu, nt), 1, M), lm);
  auto a = cond_entropy(nu, 1, N), b = cond_entropy(nt, 1, N);
  long double prod = (ln - a.value) * (ln - b.value);
  rep.rhs = {constants::kC6 * lm * prod + constants::kC7 * M * lm / N,
             constants::kC6 * lm * ((ln - a.value) * b.abs_error + (ln - b.value) * a.abs_error + 1e-18L)};
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R9

Instance gen_r9(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  long N = pick_N(rng, cfg);
  in.measures = {z_family(rng, N), z_family(rng, N)};
  in.ints = {N, pick_M(rng, N)};
  return in;
}

VerificationReport check_r9(const Instance& in, long double tol) {
  need(in, 2, 0, 2, 0, "R9");
  auto rep = start("R9", in);
  long N = in.ints[0], M = in.ints[1];
  if (!z_block_setup_ok(N, M)) return vacuous(rep, "needs 2|N and M|N");
  const auto &mu = in.measures[0], &mt = in.measures[1];
  if (!supported_in(mu, 1, N) || !supported_in(mt, 1, N) || !is_probability(mu) || !is_probability(mt))
    return vacuous(rep, "needs probability measures on [1, N]");
  long double lm = std::log2(static_cast<long double>(M)), ln = std::log2(static_cast<long double>(N));
  rep.lhs = missing_block_entropy(window_restrict(convolve(mu, mt), N), M);
  auto a = shannon(mu), b = shannon(mt);
  rep.rhs = {constants::kC4 * lm * (ln - a.value) * (ln - b.value) + constants::kC5 * M * lm / N,
             constants::kC4 * lm * ((ln - a.value) * b.abs_error + (ln - b.value) * a.abs_error + 1e-18L)};
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R10

Instance gen_r10(std::uint64_t seed, const GeneratorConfig&) {
  Rng rng(seed);
  Instance in;
  long L = rng.uniform_int(4, 10);
  long s2 = -(L + rng.uniform_int(2, 6)), s1 = s2 + L;
  // μ: well separated clusters of diameter ≤ 2^{σ2−3}.
  Rational sep = pow_rat(2, s1 + 3), fine = pow_rat(2, s2 - 6);
  std::vector<std::pair<Rational, Rational>> mu_atoms;
  long clusters = rng.uniform_int(1, 4);
  for (long c = 0; c < clusters; ++c) {
    long k = rng.uniform_int(1, 3);
    for (long a = 0; a < k; ++a) mu_atoms.push_back({c * sep + fine * rng.uniform_int(0, 8), Rational(rng.uniform_int(1, 16))});
  }
  // ν: near-uniform on the lattice 2^{σ2−1}ℤ ∩ [0, 2^{σ1}).
  long count = 1L << (L + 1);
  auto nu = near_uniform(rng, 0, count, 0.5L * static_cast<long double>(rng.uniform01()), -1, 1, Integer(1));
  in.measures = {normalized(DiscreteMeasure::from_rational_atoms(mu_atoms)), normalized(affine(nu, pow_rat(2, s2 - 1), 0))};
  in.scales = {Rational(s2), Rational(s1)};
  in.params = {rand_ratio(rng, 5, 45, 100), rand_ratio(rng, 5, 50, 100)};
  return in;
}

VerificationReport check_r10(const Instance& in, long double tol) {
  need(in, 2, 2, 0, 2, "R10");
  auto rep = start("R10", in);
  const Rational &s2 = in.scales[0], &s1 = in.scales[1];
  const Rational &a = in.params[0], &b = in.params[1];
  if (!(s2 < s1 && s1 < 0)) return vacuous(rep, "needs σ2 < σ1 < 0");
  if (!(a > 0 && a < Rational(1, 2) && b > 0 && b <= Rational(1, 2))) return vacuous(rep, "needs 0 < α < 1/2, 0 < β ≤ 1/2");
  const auto &mu = in.measures[0], &nu = in.measures[1];
  if (!is_probability(mu) || !is_probability(nu)) return vacuous(rep, "needs probability measures");
  long double alpha = to_ld(a), beta = to_ld(b), len = to_ld(s1 - s2);
  long double threshold = constants::low_entropy_c_hypothesis(alpha) * beta * len;
  auto prof = entropy_profile(mu, s2, s1, Rational(1, 8));
  auto cnt = separated_level_set_count(prof, alpha, s2, s1);
  if (static_cast<long double>(cnt.lo) >= threshold) return vacuous(rep, "level set of μ too large");
  if (static_cast<long double>(cnt.hi) >= threshold) return vacuous(rep, "level set count undecided");
  Rational t2 = dyadic_scale(s2), t1 = dyadic_scale(s1);
  auto hn = cond_entropy(nu, t2, t1);
  if (hn.value - hn.abs_error <= beta * len) return vacuous(rep, "H(ν) too small");
  long double gain = constants::low_entropy_c_conclusion(alpha) * beta / std::log2(1 / beta) * len;
  rep.lhs = plus(cond_entropy(mu, t2, t1), gain - 3);
  rep.rhs = cond_entropy(convolve(mu, nu), t2, t1);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R11

Instance gen_r11(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational t = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
  DiscreteMeasure mu;
  long double h = 1;
  for (int tries = 0; tries < 8 && h > 0.95L; ++tries) {
    mu = generic_measure(rng, cfg, canon(t * rand_ratio(rng, 1, 64, 4)));
    auto hv = cond_entropy(mu, t, 2 * t);
    h = hv.value + hv.abs_error + 1e-12L;
  }
  long double gap = std::max(1e-6L, 1 - h);
  long double tl = to_ld(t);
  Rational r2 = ld_down(tl * gap / 10 * (0.5L + 0.5L * static_cast<long double>(rng.uniform01())));
  if (r2 <= 0) r2 = Rational(1, 1L << 40);
  Rational r1 = ld_up(144 * tl / (gap * gap) * (1 + static_cast<long double>(rng.uniform01())));
  in.measures = {mu, bernoulli_pair(Position::rational(0), t, 1)};
  in.scales = {canon(t), r2, r1};
  return in;
}

bool is_bernoulli_pair(const DiscreteMeasure& nu, const Rational& t) {
  return nu.size() == 2 && nu.is_rational() && nu.weight(0) == nu.weight(1) && is_probability(nu) &&
         nu.position_rational(1) - nu.position_rational(0) == t;
}

VerificationReport check_r11(const Instance& in, long double tol) {
  need(in, 2, 3, 0, 0, "R11");
  auto rep = start("R11", in);
  const Rational &t = in.scales[0], &r2 = in.scales[1], &r1 = in.scales[2];
  const auto &mu = in.measures[0], &nu = in.measures[1];
  if (!(t > 0 && r2 > 0 && r1 > r2)) return vacuous(rep, "needs 0 < r2 < r1, t > 0");
  if (!is_bernoulli_pair(nu, t)) return vacuous(rep, "ν is not a Bernoulli pair at distance t");
  auto hv = cond_entropy(mu, t, 2 * t);
  long double gap = 1 - (hv.value + hv.abs_error);  // conservative
  long double tl = to_ld(t);
  if (gap <= 0) return vacuous(rep, "H(μ; t|2t) = 1");
  if (to_ld(r2) > tl * gap / 10 * (1 - 1e-15L)) return vacuous(rep, "r2 too large");
  if (to_ld(r1) < 144 * tl / (gap * gap) * (1 + 1e-15L)) return vacuous(rep, "r1 too small");
  rep.lhs = plus(cond_entropy(mu, r2, r1), (1 - hv.value) / 3);
  rep.lhs.abs_error += hv.abs_error / 3;
  rep.rhs = cond_entropy(convolve(mu, nu), r2, r1);
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R12

Instance gen_r12(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  Rational t = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
  in.measures = {generic_measure(rng, cfg, canon(t * rand_ratio(rng, 1, 64, 4))),
                 bernoulli_pair(Position::rational(rand_ratio(rng, -8, 8, 4)), t, 1)};
  in.scales = {canon(t)};
  return in;
}

VerificationReport check_r12(const Instance& in, long double tol) {
  need(in, 2, 1, 0, 0, "R12");
  auto rep = start("R12", in);
  const Rational& t = in.scales[0];
  if (!(t > 0) || !is_bernoulli_pair(in.measures[1], t)) return vacuous(rep, "ν is not a Bernoulli pair at distance t");
  const auto& mu = in.measures[0];
  rep.lhs = scale_entropy(convolve(mu, in.measures[1]), t);
  rep.rhs = plus(scale_entropy(mu, t) - cond_entropy(mu, t, 2 * t), 1);
  settle_equality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R13

Instance gen_r13(std::uint64_t seed, const GeneratorConfig&) {
  Rng rng(seed);
  Instance in;
  long nx = rng.uniform_int(1, 6), ny = rng.uniform_int(1, 6);
  bool integer = rng.uniform_int(0, 1) == 0;
  auto value = [&] { return integer ? Rational(rng.uniform_int(-5, 5)) : rand_ratio(rng, -40, 40, 8); };
  std::vector<Rational> xs, ys;
  for (long i = 0; i < nx; ++i) xs.push_back(value());
  for (long i = 0; i < ny; ++i) ys.push_back(value());
  long total = 0;
  std::vector<std::array<Rational, 3>> cells;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      long w = rng.uniform_int(0, 3) == 0 ? 0 : rng.uniform_int(1, 100);
      if (w == 0) continue;
      total += w;
      cells.push_back({x, y, Rational(w)});
    }
  if (cells.empty()) {
    cells.push_back({xs[0], ys[0], Rational(1)});
    total = 1;
  }
  for (auto& c : cells) c[2] = canon(c[2] / total);
  in.joint = cells;
  return in;
}

VerificationReport check_r13(const Instance& in, long double tol) {
  auto rep = start("R13", in);
  if (in.joint.empty()) throw std::invalid_argument("instance is missing fields for rule R13");
  std::vector<std::pair<Rational, Rational>> xs, ys, ds;
  Rational total = 0;
  for (const auto& c : in.joint) {
    if (c[2] < 0) return vacuous(rep, "negative joint mass");
    xs.push_back({c[0], c[2]});
    ys.push_back({c[1], c[2]});
    ds.push_back({c[1] - c[0], c[2]});
    total += c[2];
  }
  if (total != 1) return vacuous(rep, "joint law is not a probability");
  auto d = shannon(DiscreteMeasure::from_rational_atoms(xs)) - shannon(DiscreteMeasure::from_rational_atoms(ys));
  rep.lhs = {std::fabs(d.value), d.abs_error};
  rep.rhs = shannon(DiscreteMeasure::from_rational_atoms(ds));
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R14

Instance gen_r14(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  if (rng.uniform_int(0, 1) == 0) {
    for (int i = 0; i < 2; ++i)
      in.measures.push_back(normalized(
          random_integer_measure(rng, rng.uniform_int(-4, 4), static_cast<std::size_t>(rng.uniform_int(1, 12)), pick_profile(rng))));
  } else {
    Rational r = rand_ratio(rng, 1, 16, rng.uniform_int(1, 16));
    Rational span = canon(r * rand_ratio(rng, 1, 32, 4));
    in.measures = {generic_measure(rng, cfg, span), generic_measure(rng, cfg, span)};
    in.scales = {canon(r)};
  }
  return in;
}

VerificationReport check_r14(const Instance& in, long double tol) {
  need(in, 2, 0, 0, 0, "R14");
  auto rep = start("R14", in);
  const auto &X = in.measures[0], &Z = in.measures[1];
  if (in.scales.empty()) {
    rep.lhs = shannon(convolve(X, Z));
    rep.rhs = shannon(X) + shannon(Z);
  } else {
    // Y = Z + I_r: the log r terms cancel.
    const Rational& r = in.scales[0];
    if (!(r > 0)) return vacuous(rep, "needs r > 0");
    rep.lhs = scale_entropy(convolve(X, Z), r);
    rep.rhs = shannon(X) + scale_entropy(Z, r);
    rep.note = "mixed";
  }
  settle_inequality(rep, tol);
  return rep;
}

// ---------------------------------------------------------------- R15 .. R18

Instance gen_l2_pair(std::uint64_t seed, const GeneratorConfig& cfg, long double eps_max, bool sub_probability) {
  Rng rng(seed);
  Instance in;
  long N = pick_N(rng, cfg);
  for (int i = 0; i < 2; ++i) {
    long double eps = eps_max * static_cast<long double>(rng.uniform01());
    if (sub_probability)
      in.measures.push_back(near_uniform(rng, 1, N, eps, -1, 0, Integer(N) * kUnit));
    else
      in.measures.push_back(near_uniform(rng, 1, N, eps, -1, 1, Integer(N) * kUnit));
  }
  in.ints = {N, pick_M(rng, N)};
  return in;
}

Instance gen_r15(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(mix_seed(seed, 15));
  // Mostly inside the L² ball, sometimes just outside it.
  return gen_l2_pair(seed, cfg, rng.uniform_int(0, 9) == 0 ? 0.4L : 0.16L, true);
}

VerificationReport check_r15(const Instance& in, long double tol) {
  need(in, 2, 0, 2, 0, "R15");
  auto rep = start("R15", in);
  long N = in.ints[0], M = in.ints[1];
  if (!z_block_setup_ok(N, M)) return vacuous(rep, "needs 2|N and M|N");
  const auto &f = in.measures[0], &ft = in.measures[1];
  if (!supported_in(f, 1, N) || !supported_in(ft, 1, N)) return vacuous(rep, "needs support in [1, N]");
  Rational two_over_n(2, N), ball(1, 100 * N);
  Rational a = dist_sq_uniform(f, N), b = dist_sq_uniform(ft, N);
  if (sup_norm(f) > two_over_n || sup_norm(ft) > two_over_n) return vacuous(rep, "sup norm above 2/N");
  if (f.total_mass() > 1 || ft.total_mass() > 1) return vacuous(rep, "L¹ norm above 1");
  if (a > ball || b > ball) return vacuous(rep, "‖f − χ_N‖₂² above 1/(100N)");
  long double lm = std::log2(static_cast<long double>(M));
  rep.lhs = missing_block_entropy(window_restrict(convolve(f, ft), N), M);
  long double Nl = static_cast<long double>(N);
  rep.rhs = exact(constants::kC1 * (Nl * Nl * to_ld(a) * to_ld(b) + M * lm / Nl));
  settle_inequality(rep, tol);
  return rep;
}

Instance gen_r16(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  long N = pick_N(rng, cfg);
  auto f = near_uniform(rng, 1, N, static_cast<long double>(rng.uniform01()), -1, 1, Integer(N) * kUnit);
  DiscreteMeasure g;
  if (rng.uniform_int(0, 1) == 0) {
    long n = rng.uniform_int(1, std::min(N, 16L));
    g = random_integer_measure(rng, rng.uniform_int(1, N - n + 1), static_cast<std::size_t>(n), pick_profile(rng));
  } else {
    g = z_family(rng, N);
  }
  g = scale_mass(normalized(g), rand_ratio(rng, 1, 16, 16));
  in.measures = {f, g};
  in.ints = {N, pick_M(rng, N)};
  return in;
}

VerificationReport check_r16(const Instance& in, long double tol) {
  need(in, 2, 0, 2, 0, "R16");
  auto rep = start("R16", in);
  long N = in.ints[0], M = in.ints[1];
  if (!z_block_setup_ok(N, M)) return vacuous(rep, "needs 2|N and M|N");
  const auto &f = in.measures[0], &g = in.measures[1];
  if (!supported_in(f, 1, N) || !supported_in(g, 1, N)) return vacuous(rep, "needs support in [1, N]");
  if (f.total_mass() < Rational(1, 2)) return vacuous(rep, "‖f‖₁ below 1/2");
  if (sup_norm(f) > Rational(2, N)) return vacuous(rep, "‖f‖∞ above 2/N");
  if (g.total_mass() > 1) return vacuous(rep, "‖g‖₁ above 1");
  long double lm = std::log2(static_cast<long double>(M)), Nl = static_cast<long double>(N);
  rep.lhs = missing_block_entropy(window_restrict(convolve(f, g), N), M);
  rep.rhs = exact(constants::kL2L1Product * Nl * to_ld(dist_sq_uniform(f, N)) * to_ld(g.total_mass()) +
                  constants::kL2L1Tail * M * lm / Nl);
  settle_inequality(rep, tol);
  return rep;
}

Instance gen_r17(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed);
  Instance in;
  long N = pick_N(rng, cfg);
  for (int i = 0; i < 2; ++i)
    in.measures.push_back(near_uniform(rng, 1, N, 0.99L * static_cast<long double>(rng.uniform01()), -1, 1, Integer(N) * kUnit));
  in.ints = {N, 1, 2, 3, std::max(1L, N / 16), std::max(1L, N / 4), N / 2, N, rng.uniform_int(1, 2 * N)};
  return in;
}

VerificationReport check_r17(const Instance& in, long double) {
  need(in, 2, 0, 2, 0, "R17");
  auto rep = start("R17", in);
  long N = in.ints[0];
  const auto &f = in.measures[0], &ft = in.measures[1];
  if (N < 1 || !supported_in(f, 1, N) || !supported_in(ft, 1, N)) return vacuous(rep, "needs support in [1, N]");
  if (sup_norm(f) >= Rational(2, N) || sup_norm(ft) >= Rational(2, N)) return vacuous(rep, "sup norm not below 2/N");
  auto c = convolve(f, ft);
  auto v = dense_weights(c, 2, 2 * N);
  const Integer& W = c.mass_den();
  Rational four_ab = 4 * dist_sq_uniform(f, N) * dist_sq_uniform(ft, N);
  bool ok = true;
  long double worst = -INFINITY;
  auto at = [&](long n) -> Integer { return (n < 2 || n > 2 * N) ? Integer(0) : v[static_cast<std::size_t>(n - 2)]; };
  for (std::size_t k = 1; k < in.ints.size(); ++k) {
    long m = in.ints[k];
    if (m < 1) continue;
    Integer best = 0;
    for (long n = 2 - m; n <= 2 * N; ++n) {
      Integer d = at(n) - at(n + m);
      if (d < 0) d = -d;
      if (d > best) best = d;
    }
    Rational q = canon(Rational(best, W)) - Rational(3 * m, N * N);
    worst = std::max(worst, to_ld(q));
    if (q > 0 && q * q > four_ab) ok = false;
  }
  rep.lhs = exact(worst);
  rep.rhs = exact(std::sqrt(to_ld(four_ab)));
  rep.margin = rep.rhs.value - rep.lhs.value;
  rep.pass = ok;
  return rep;
}

Instance gen_r18(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(mix_seed(seed, 18));
  return gen_l2_pair(seed, cfg, rng.uniform_int(0, 9) == 0 ? 0.4L : 0.16L, true);
}

VerificationReport check_r18(const Instance& in, long double) {
  need(in, 2, 0, 1, 0, "R18");
  auto rep = start("R18", in);
  long N = in.ints[0];
  const auto &f = in.measures[0], &ft = in.measures[1];
  if (N < 2 || N % 2 != 0) return vacuous(rep, "needs N even");
  if (!supported_in(f, 1, N) || !supported_in(ft, 1, N)) return vacuous(rep, "needs support in [1, N]");
  Rational ball(1, 100 * N);
  if (dist_sq_uniform(f, N) > ball || dist_sq_uniform(ft, N) > ball) return vacuous(rep, "‖f − χ_N‖₂ above 1/(10√N)");
  auto c = convolve(f, ft);
  auto v = dense_weights(c, N / 2 + 1, 3 * N / 2);
  Integer lo = *std::min_element(v.begin(), v.end());
  Rational minv = canon(Rational(lo, c.mass_den()));
  Rational bound(1, 4 * N);
  rep.lhs = exact(to_ld(bound));
  rep.rhs = exact(to_ld(minv));
  rep.margin = rep.rhs.value - rep.lhs.value;
  rep.pass = minv >= bound;
  return rep;
}

std::vector<Rule> build_catalog() {
  using C = std::string;
  return {
      {"R1", "conv-monotone", "H(X+Y; r1|r2) ≥ H(X; r1|r2) for r2/r1 ∈ ℤ, r2 > r1", "", gen_r1, check_r1},
      {"R2", "scale-lipschitz", "0 ≤ H(X; r2) − H(X; r1) ≤ 2(log r1 − log r2) for r1 ≥ r2 > 0", "", gen_r2, check_r2},
      {"R3", "perturbation", "|H(X; r2) − H(Y; r2)| ≤ 2(r1/r2) log(r2/r1) if X ≤ Y ≤ X + r1 and 2r1 ≤ r2", "", gen_r3, check_r3},
      {"R4", "fractional-scale", "H(μ*ν; r2|r1) ≥ H(μ; r2|r1) − 2/(ln 2 (r1/r2 − 1)) for 0 < r2 < r1", "", gen_r4, check_r4},
      {"R5", "superadditivity", "H(Σμ_i; r/N|r) ≥ Σ H(μ_i; r/N|r)", "", gen_r5, check_r5},
      {"R6", "submodularity", "H(X+Y+Z) + H(Y) ≤ H(X+Y) + H(Y+Z) (discrete)", "", gen_r6, check_r6},
      {"R7", "high-entropy", "H(μ; s|2s), H(μ̃; s|2s) ≥ 1 − α near r ⇒ H(μ*μ̃; r|2r) ≥ 1 − C (log α⁻¹)³ α²",
       C("C = 1e8"), gen_r7, check_r7},
      {"R8", "high-entropy-Z", "log M − H(ν*ν̃; 1|M) ≤ C6 log M (log N − H(ν;1|N))(log N − H(ν̃;1|N)) + C7 M log M / N",
       C("C6 = 6e4, C7 = 4000"), gen_r8, check_r8},
      {"R9", "restricted-conv", "‖σ‖ log M − H(σ; 1|M) ≤ C4 log M (log N − H(μ))(log N − H(μ̃)) + C5 M log M / N",
       C("C4 = 4e4, C5 = 3000"), gen_r9, check_r9},
      {"R10", "low-entropy", "H(μ*ν; 2^σ2|2^σ1) > H(μ; 2^σ2|2^σ1) + c β (log β⁻¹)⁻¹ (σ1 − σ2) − 3",
       C("c_hyp = 1/(1000 log α⁻¹), c = α/(1e7 log α⁻¹)"), gen_r10, check_r10},
      {"R11", "conv-by-bernoulli", "H(μ*ν; r2|r1) ≥ H(μ; r2|r1) + (1 − H(μ; t|2t))/3", C("1/10, 144, 1/3"), gen_r11, check_r11},
      {"R12", "bernoulli-exact", "H(μ*ν; t) = H(μ; t) + 1 − H(μ; t|2t)", "", gen_r12, check_r12},
      {"R13", "entropy-difference", "|H(X) − H(Y)| ≤ H(Y − X)", "", gen_r13, check_r13},
      {"R14", "subadd-mixed", "H(X+Y) ≤ H(X) + H(Y)", "", gen_r14, check_r14},
      {"R15", "L2-conv", "‖ρ‖ log M − H(ρ; 1|M) ≤ C1 (N² ‖f−χ‖² ‖f̃−χ‖² + M log M / N)", C("C1 = 1000"), gen_r15, check_r15},
      {"R16", "L2-L1-conv", "‖ρ‖ log M − H(ρ; 1|M) ≤ 8N ‖f−χ‖² ‖g‖₁ + 6 M log M / N", C("8, 6"), gen_r16, check_r16},
      {"R17", "diff-bound", "|f*f̃(n) − f*f̃(n+m)| ≤ 3m/N² + 2 ‖f−χ‖₂ ‖f̃−χ‖₂", C("3, 2"), gen_r17, check_r17},
      {"R18", "lower-bound", "f*f̃(n) ≥ 1/(4N) on [N/2+1, 3N/2]", C("1/4"), gen_r18, check_r18},
  };
}

}  // namespace

// ---------------------------------------------------------------- public

bool admits_shift_coupling(const DiscreteMeasure& X, const DiscreteMeasure& Y, const Rational& d) {
  if (!X.is_rational() || !Y.is_rational()) throw std::invalid_argument("admits_shift_coupling needs rational measures");
  if (X.total_mass() != Y.total_mass()) return false;
  // F_Y(t) ≤ F_X(t) and F_Y(t) ≥ F_X(t − d) at every atom of either law.
  std::vector<std::pair<Rational, Rational>> xs, ys;
  for (std::size_t i = 0; i < X.size(); ++i) xs.push_back({X.position_rational(i), X.mass(i)});
  for (std::size_t i = 0; i < Y.size(); ++i) ys.push_back({Y.position_rational(i), Y.mass(i)});
  auto cdf = [](const std::vector<std::pair<Rational, Rational>>& a, const Rational& t) {
    Rational s = 0;
    for (const auto& [x, m] : a) {
      if (x > t) break;
      s += m;
    }
    return s;
  };
  std::vector<Rational> pts;
  for (const auto& [x, m] : xs) pts.push_back(x), pts.push_back(x + d);
  for (const auto& [y, m] : ys) pts.push_back(y);
  for (const auto& t : pts) {
    Rational fy = cdf(ys, t);
    if (fy > cdf(xs, t)) return false;
    if (fy < cdf(xs, t - d)) return false;
  }
  return true;
}

const std::vector<Rule>& rule_catalog() {
  static const std::vector<Rule> catalog = build_catalog();
  return catalog;
}

const Rule& find_rule(const std::string& id) {
  for (const auto& r : rule_catalog())
    if (r.id == id || r.name == id) return r;
  throw std::invalid_argument("unknown rule: " + id);
}

VerificationReport verify(const std::string& rule_id, const Instance& instance, long double tol) {
  return find_rule(rule_id).check(instance, tol);
}

namespace {

void accumulate(RuleSummary& s, const VerificationReport& r) {
  ++s.total;
  if (r.vacuous()) {
    ++s.vacuous;
    ++s.passed;
    return;
  }
  if (r.pass)
    ++s.passed;
  else
    ++s.failed;
  std::size_t decided = s.total - s.vacuous;
  s.worst_margin = decided == 1 ? r.margin : std::min(s.worst_margin, r.margin);
  s.max_abs_margin = std::max(s.max_abs_margin, std::fabs(r.margin));
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& rule, std::size_t k) {
  return mix_seed(seed, hash_string(rule) + static_cast<std::uint64_t>(k));
}

}  // namespace

SuiteResult run_suite(const std::vector<std::string>& rule_ids, const GeneratorConfig& config, std::size_t n_instances,
                      std::uint64_t seed, const SuiteOptions& options) {
  std::vector<const Rule*> rules;
  for (const auto& id : rule_ids) rules.push_back(&find_rule(id));
  SuiteResult res;
  const std::size_t total = rules.size() * n_instances;
  res.reports.resize(total);
  std::vector<Instance> failing(total);
  std::vector<char> failed(total, 0);
  parallel_for(total, [&](std::size_t idx) {
    const Rule& rule = *rules[idx / n_instances];
    std::size_t k = idx % n_instances;
    Instance in = rule.generate(instance_seed(seed, rule.id, k), config);
    res.reports[idx] = rule.check(in, options.tol);
    if (!res.reports[idx].pass) {
      failed[idx] = 1;
      failing[idx] = std::move(in);
    }
  });
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto& r = res.reports[idx];
    RuleSummary& s = res.per_rule[r.rule];
    accumulate(s, r);
    accumulate(res.total, r);
    if (failed[idx] && !options.repro_dir.empty()) {
      std::filesystem::create_directories(options.repro_dir);
      std::string path = options.repro_dir + "/" + r.rule + "_" + std::to_string(idx % n_instances) + "_" + r.digest + ".json";
      nlohmann::json j;
      j["rule"] = r.rule;
      j["seed"] = seed;
      j["index"] = idx % n_instances;
      j["instance"] = failing[idx].to_json();
      j["report"] = r.to_json();
      std::ofstream(path) << j.dump(1) << '\n';
      res.reproducers.push_back(path);
    }
  }
  for (auto& [id, s] : res.per_rule)
    if (s.total == s.vacuous) s.worst_margin = std::numeric_limits<long double>::quiet_NaN();
  if (res.total.total == res.total.vacuous) res.total.worst_margin = std::numeric_limits<long double>::quiet_NaN();
  return res;
}

nlohmann::json summary_to_json(const SuiteResult& result) {
  auto one = [](const RuleSummary& s) {
    nlohmann::json j;
    j["total"] = s.total;
    j["passed"] = s.passed;
    j["vacuous"] = s.vacuous;
    j["failed"] = s.failed;
    if (std::isnan(s.worst_margin))
      j["worst_margin"] = nullptr;
    else
      j["worst_margin"] = static_cast<double>(s.worst_margin);
    j["max_abs_margin"] = static_cast<double>(s.max_abs_margin);
    return j;
  };
  nlohmann::json j;
  j["total"] = one(result.total);
  j["rules"] = nlohmann::json::object();
  for (const auto& [id, s] : result.per_rule) j["rules"][id] = one(s);
  j["reproducers"] = result.reproducers;
  return j;
}

std::vector<ScanEntry> tightness_scan(const std::string& rule_id, const GeneratorConfig& config, std::size_t n_candidates,
                                      std::uint64_t seed, std::size_t keep) {
  const Rule& rule = find_rule(rule_id);
  std::vector<ScanEntry> all(n_candidates);
  std::vector<char> used(n_candidates, 0);
  parallel_for(n_candidates, [&](std::size_t k) {
    Instance in = rule.generate(instance_seed(seed, rule.id, k), config);
    VerificationReport rep = rule.check(in, 1e-9L);
    if (rep.vacuous()) return;
    long double scale = std::max({std::fabs(rep.rhs.value), std::fabs(rep.lhs.value), 1e-30L});
    all[k] = {std::move(in), rep, rep.margin / scale};
    used[k] = 1;
  });
  std::vector<ScanEntry> out;
  for (std::size_t k = 0; k < n_candidates; ++k)
    if (used[k]) out.push_back(std::move(all[k]));
  std::stable_sort(out.begin(), out.end(), [](const ScanEntry& a, const ScanEntry& b) { return a.ratio < b.ratio; });
  if (out.size() > keep) out.resize(keep);
  return out;
}

}  // namespace bc
