// bcent: command-line front end for the Bernoulli-convolution entropy toolkit.
//
//   bcent mahler --poly "x^2-x-1"
//   bcent entropy --level 1/2 --p 1/2 --l 8 --scales "2^-1..2^-10" --format csv
//   bcent verify --rules R12 --n 100
//   bcent check --criterion rational --a 1 --b 1e50 --p 1/2
//   bcent study --lambda "x^2+x-1" --p 1/2 --lmax 18 --separation
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 resource bound exceeded.
#include "bc/bcstudy.hpp"
#include "bc/criteria.hpp"
#include "bc/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bc;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kVerifyFail = 1, kUsage = 2, kResource = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  int precision_bits = 128;
  int enumeration_bound = 26;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  std::string format = "json";
  unsigned threads = 0;
};

void emit(const Config& cfg, const json& j, const std::string& csv) {
  if (cfg.format == "csv")
    std::cout << csv;
  else
    std::cout << j.dump(2) << "\n";
}

std::string ld(long double v) {
  std::ostringstream os;
  os.precision(17);
  os << static_cast<double>(v);
  return os.str();
}

AlgebraicPtr parse_lambda(const std::string& text) {
  if (text.find('x') == std::string::npos && text.find('[') == std::string::npos) {
    Rational q = parse_rational(text);
    if (q <= 0 || q >= 1) throw UsageError("λ must lie in (0, 1)");
    return AlgebraicNumber::from_rational(q);
  }
  IntPolynomial P = parse_polynomial(text);
  std::vector<AlgebraicPtr> inside;
  for (auto& r : isolate_real_roots(P, 0, 1))
    if (r->compare(0) > 0 && r->compare(1) < 0) inside.push_back(r);
  if (inside.size() != 1)
    throw UsageError(P.to_string() + " has " + std::to_string(inside.size()) + " roots in (0, 1), expected exactly one");
  return inside.front();
}

/// Comma-separated rationals and dyadic ranges "2^a..2^b".
std::vector<Rational> parse_scales(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      Rational r = parse_rational(item);
      if (r <= 0) throw UsageError("scales must be positive");
      out.push_back(r);
      continue;
    }
    auto exponent = [&](const std::string& s) {
      if (s.rfind("2^", 0) != 0) throw UsageError("scale range endpoints must be powers 2^k: " + item);
      try {
        return std::stol(s.substr(2));
      } catch (const std::exception&) {
        throw UsageError("bad exponent in scale range: " + item);
      }
    };
    long a = exponent(item.substr(0, dots)), b = exponent(item.substr(dots + 2));
    const long step = a <= b ? 1 : -1;
    if (std::labs(b - a) > 4096) throw UsageError("scale range too long: " + item);
    for (long e = a;; e += step) {
      out.push_back(pow_rat(Rational(2), e));
      if (e == b) break;
    }
  }
  if (out.empty()) throw UsageError("no scales given");
  return out;
}

json ri_json(const RationalInterval& r) {
  return {{"lo", to_fraction_string(r.lo)}, {"hi", to_fraction_string(r.hi)}, {"approx", static_cast<double>(to_ld(r.lo))}};
}

// ---------------------------------------------------------------- mahler

int cmd_mahler(const Config& cfg, const std::string& poly) {
  IntPolynomial P = parse_polynomial_verbatim(poly);
  if (P.degree() < 1) throw UsageError("polynomial of degree 0");
  MahlerEnclosure M = mahler_measure(P, cfg.precision_bits);
  RootCensus rc = root_census(P);
  json j{{"poly", P.to_string()},
         {"degree", P.degree()},
         {"mahler", ri_json({M.lo, M.hi})},
         {"precision_bits", M.precision_bits},
         {"roots", {{"inside", rc.inside}, {"on", rc.on}, {"outside", rc.outside}}}};
  std::ostringstream csv;
  csv << "poly,degree,lo,hi,approx\n"
      << '"' << P.to_string() << "\"," << P.degree() << ',' << to_fraction_string(M.lo) << ',' << to_fraction_string(M.hi) << ','
      << ld(to_ld(M.lo)) << "\n";
  emit(cfg, j, csv.str());
  return kOk;
}

// ---------------------------------------------------------------- entropy

int cmd_entropy(const Config& cfg, const std::string& file, const std::string& level, const std::string& p_text, int l,
                const std::string& scales_text) {
  DiscreteMeasure mu;
  json source;
  if (!file.empty() == !level.empty()) throw UsageError("give exactly one of --measure and --level");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open " + file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed measure file: ") + e.what());
    }
    mu = DiscreteMeasure::from_json(j);
    source = {{"measure", file}};
  } else {
    if (l < 0) throw UsageError("--l must be non-negative");
    AlgebraicPtr lam = parse_lambda(level);
    Rational p = parse_rational(p_text);
    if (p <= 0 || p >= 1) throw UsageError("p must lie in (0, 1)");
    mu = l == 0 ? dirac(Position::rational(0)) : level_measure(lam, p, LevelInterval::standard(l), cfg.enumeration_bound);
    source = {{"level", level}, {"p", to_fraction_string(p)}, {"l", l}};
  }
  if (mu.size() == 0) throw UsageError("empty measure");
  std::vector<Rational> scales = parse_scales(scales_text);
  std::vector<EntropyValue> H(scales.size()), C(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    H[i] = scale_entropy(mu, scales[i]);
    C[i] = cond_entropy(mu, scales[i], scales[i] * 2);
  });
  json rows = json::array();
  std::ostringstream csv;
  csv << "scale,log2_scale,H,H_cond,abs_error\n";
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const long double err = std::max(H[i].abs_error, C[i].abs_error);
    rows.push_back({{"scale", to_fraction_string(scales[i])},
                    {"H", static_cast<double>(H[i].value)},
                    {"H_cond", static_cast<double>(C[i].value)},
                    {"abs_error", static_cast<double>(err)}});
    csv << to_fraction_string(scales[i]) << ',' << ld(log2_ld(scales[i])) << ',' << ld(H[i].value) << ',' << ld(C[i].value)
        << ',' << ld(err) << "\n";
  }
  emit(cfg, {{"source", source}, {"atoms", mu.size()}, {"profile", rows}}, csv.str());
  return kOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Config& cfg, const std::string& rules_text, std::size_t n, const std::string& repro_dir, int log2_n_max) {
  std::vector<std::string> ids;
  if (rules_text.empty() || rules_text == "all") {
    for (const auto& r : rule_catalog()) ids.push_back(r.id);
  } else {
    std::stringstream ss(rules_text);
    std::string id;
    while (std::getline(ss, id, ',')) {
      try {
        ids.push_back(find_rule(id).id);
      } catch (const std::invalid_argument&) {
        throw UsageError("unknown rule: " + id);
      }
    }
  }
  GeneratorConfig gc;
  if (log2_n_max > 0) gc.log2_n_max = std::max(log2_n_max, gc.log2_n_min);
  SuiteOptions opts;
  opts.tol = cfg.tolerance;
  opts.repro_dir = repro_dir;
  SuiteResult res = run_suite(ids, gc, n, cfg.seed, opts);
  std::ostringstream csv;
  csv << "rule,total,passed,vacuous,failed,worst_margin,max_abs_margin\n";
  for (const auto& [id, s] : res.per_rule)
    csv << id << ',' << s.total << ',' << s.passed << ',' << s.vacuous << ',' << s.failed << ','
        << (std::isnan(s.worst_margin) ? std::string("nan") : ld(s.worst_margin)) << ',' << ld(s.max_abs_margin) << "\n";
  json j = summary_to_json(res);
  j["seed"] = cfg.seed;
  j["instances_per_rule"] = n;
  emit(cfg, j, csv.str());
  return res.total.failed == 0 ? kOk : kVerifyFail;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string criterion, a, b, p = "1/2", n, k, poly, lambda, c, eps = "1/10", batch;
};

std::string need(const std::string& v, const char* flag) {
  if (v.empty()) throw UsageError(std::string("missing required parameter --") + flag);
  return v;
}

std::string report_csv_header() { return "criterion,lambda,p,verdict,inequality_holds,pm1_status,precision_bits,threshold,one_minus_lambda\n"; }

std::string report_csv_row(const CriterionReport& r) {
  std::ostringstream os;
  auto approx = [](const std::optional<RationalInterval>& x) { return x ? ld(to_ld(x->lo)) : std::string(); };
  os << r.criterion << ",\"" << r.lambda << "\"," << to_fraction_string(r.p) << ',' << to_string(r.verdict) << ','
     << (r.inequality_holds ? (*r.inequality_holds ? "true" : "false") : "unknown") << ',' << r.pm1_status << ','
     << r.precision_bits << ',' << approx(r.threshold) << ',' << approx(r.one_minus_lambda) << "\n";
  return os.str();
}

int emit_report(const Config& cfg, const CriterionReport& r, json extra = json::object()) {
  json j = r.to_json();
  for (auto& [k, v] : extra.items()) j[k] = v;
  emit(cfg, j, report_csv_header() + report_csv_row(r));
  return r.verdict == Verdict::Fail ? kVerifyFail : kOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"')
      quoted = !quoted;
    else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r')
      cur += ch;
  }
  out.push_back(cur);
  for (auto& s : out) {
    auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

int cmd_check_batch(const Config& cfg, const CriterionConfig& cc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (f.size() < 2) throw UsageError("batch rows must be (polynomial, p): " + line);
    while (f.size() > 2) {  // unquoted coefficient list
      f[0] += "," + f[1];
      f.erase(f.begin() + 1);
    }
    if (first && (f[0] == "polynomial" || f[0] == "poly")) {
      first = false;
      continue;
    }
    first = false;
    rows.emplace_back(f[0], f[1]);
  }
  std::vector<CriterionReport> reports(rows.size());
  std::vector<std::string> errors(rows.size());
  for (const auto& [poly, p] : rows) {
    parse_lambda(poly);
    parse_rational(p);
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    try {
      reports[i] = explicit_condition(parse_lambda(rows[i].first), parse_rational(rows[i].second), cc);
    } catch (const std::invalid_argument& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw UsageError(e);
  json arr = json::array();
  std::string csv = report_csv_header();
  bool any_fail = false;
  for (const auto& r : reports) {
    arr.push_back(r.to_json());
    csv += report_csv_row(r);
    any_fail |= r.verdict == Verdict::Fail;
  }
  emit(cfg, {{"reports", arr}}, csv);
  return any_fail ? kVerifyFail : kOk;
}

int cmd_check(const Config& cfg, const CheckArgs& a) {
  CriterionConfig cc;
  cc.bits = cfg.precision_bits;
  cc.max_bits = std::max(cc.max_bits, cfg.precision_bits);
  if (!a.batch.empty()) return cmd_check_batch(cfg, cc, a.batch);
  const std::string& id = need(a.criterion, "criterion");
  auto P = [&] { return parse_rational(a.p); };
  if (id == "explicit") return emit_report(cfg, explicit_condition(parse_lambda(need(a.lambda, "lambda")), P(), cc));
  if (id == "rational")
    return emit_report(cfg, rational_condition(parse_integer(need(a.a, "a")), parse_integer(need(a.b, "b")), P(), cc));
  if (id == "nth-root")
    return emit_report(cfg, nth_root_condition(parse_integer(need(a.n, "n")), parse_integer(need(a.k, "k")), P(), cc));
  if (id == "sparse") {
    auto s = sparse_poly_family(parse_polynomial_verbatim(need(a.poly, "poly")), parse_integer(need(a.n, "n")), P(), cc);
    json extra{{"eisenstein", {{"even_coefficients", s.eisenstein.even_coefficients}, {"a0_not_div4", s.eisenstein.a0_not_div4}}}};
    extra["root_enclosure"] = s.root_enclosure ? ri_json(*s.root_enclosure) : json(nullptr);
    return emit_report(cfg, s.report, extra);
  }
  if (id == "general")
    return emit_report(cfg, general_condition(parse_lambda(need(a.lambda, "lambda")), P(), parse_rational(need(a.c, "c")),
                                              parse_rational(a.eps), cc));
  if (id == "rational-boundary" || id == "nth-root-threshold" || id == "sparse-threshold") {
    Integer v = id == "rational-boundary"    ? rational_boundary(parse_integer(need(a.a, "a")), cc)
                : id == "nth-root-threshold" ? nth_root_threshold(parse_integer(need(a.n, "n")), cc)
                                             : sparse_threshold(parse_polynomial_verbatim(need(a.poly, "poly")), cc);
    emit(cfg, {{"criterion", id}, {"value", v.get_str()}, {"approx", static_cast<double>(to_ld(v))}},
         "criterion,value\n" + id + "," + v.get_str() + "\n");
    return kOk;
  }
  if (id == "mahler-bounds") {
    auto r = mahler_upper_bounds(parse_polynomial_verbatim(need(a.poly, "poly")), cfg.precision_bits);
    std::ostringstream csv;
    csv << "mahler,l2,l1,sqrt_d1_linf,chain_ok\n"
        << ld(to_ld(r.mahler.lo)) << ',' << ld(to_ld(r.l2.lo)) << ',' << r.l1.get_str() << ',' << ld(to_ld(r.sqrt_d1_linf.lo)) << ','
        << (r.chain_ok() ? "true" : "false") << "\n";
    emit(cfg, r.to_json(), csv.str());
    return r.chain_ok() ? kOk : kVerifyFail;
  }
  if (id == "dobrowolski") {
    Interval v = dobrowolski_lower(parse_integer(need(a.n, "n")), cfg.precision_bits);
    json j{{"criterion", id}, {"bound", ri_json({v.lo_rational(), v.hi_rational()})}};
    emit(cfg, j, "criterion,lo,hi\n" + id + "," + ld(v.lo_ld()) + "," + ld(v.hi_ld()) + "\n");
    return kOk;
  }
  if (id == "gaussian-gap") {
    EntropyValue g = gaussian_entropy_gap(P());
    json j{{"criterion", id}, {"p", to_fraction_string(P())}, {"value", static_cast<double>(g.value)},
           {"abs_error", static_cast<double>(g.abs_error)}, {"positive", g.value - g.abs_error > 0}};
    emit(cfg, j, "criterion,p,value,abs_error\n" + id + "," + to_fraction_string(P()) + "," + ld(g.value) + "," + ld(g.abs_error) + "\n");
    return kOk;
  }
  throw UsageError("unknown criterion: " + id);
}

// ---------------------------------------------------------------- study

int cmd_study(const Config& cfg, const std::string& lambda_text, const std::string& p_text, int lmax, bool separation, bool decay,
              int n_max) {
  if (separation && decay) throw UsageError("choose one of --garsia, --separation, --decay");
  if (lmax < 1) throw UsageError("--lmax must be ≥ 1");
  AlgebraicPtr lam = parse_lambda(lambda_text);
  Rational p = parse_rational(p_text);
  if (p <= 0 || p >= 1) throw UsageError("p must lie in (0, 1)");
  if (lmax > cfg.enumeration_bound)
    throw ResourceLimit("--lmax " + std::to_string(lmax) + " exceeds the enumeration bound " + std::to_string(cfg.enumeration_bound));
  if (decay) {
    DecayProfile d = decay_profile(lam, p, lmax, n_max, cfg.enumeration_bound);
    emit(cfg, d.to_json(), d.to_csv());
    return kOk;
  }
  if (separation) {
    std::vector<SeparationReport> reps(static_cast<std::size_t>(lmax));
    parallel_for(reps.size(), [&](std::size_t i) { reps[i] = separation_check(lam, p, static_cast<int>(i) + 1, cfg.enumeration_bound); });
    json arr = json::array();
    std::ostringstream csv;
    csv << "l,atoms,rate,log_mahler,in_window,pass\n";
    bool ok = true;
    for (const auto& r : reps) {
      arr.push_back(r.to_json());
      csv << r.l << ',' << r.atoms << ',' << ld(r.rate) << ',' << ld(r.log_mahler) << ',' << (r.in_window ? "true" : "false") << ','
          << (r.pass ? "true" : "false") << "\n";
      ok &= r.pass;
    }
    emit(cfg, {{"separation", arr}}, csv.str());
    return ok ? kOk : kVerifyFail;
  }
  HLambdaEstimate est = h_estimate(lam, p, lmax, cfg.enumeration_bound);
  json j = est.to_json();
  bool ok = true;
  if (lmax >= 3) {
    VerificationReport rep = h_bounds_check(est);
    j["bounds_check"] = rep.to_json();
    ok = rep.pass;
  }
  emit(cfg, j, est.to_csv());
  return ok ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  if (const char* env = std::getenv("BC_ENTROPY_PRECISION")) {
    try {
      cfg.precision_bits = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: BC_ENTROPY_PRECISION must be an integer\n";
      return kUsage;
    }
  }

  CLI::App app{"Entropy and absolute-continuity toolkit for Bernoulli convolutions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--bits", cfg.precision_bits, "working precision in bits")->check(CLI::Range(16, 1 << 16));
  app.add_option("--bound", cfg.enumeration_bound, "largest enumerated level")->check(CLI::Range(1, 40));
  app.add_option("--tol", cfg.tolerance, "verification tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");

  std::string poly;
  auto* mahler = app.add_subcommand("mahler", "Mahler measure enclosure of an integer polynomial");
  mahler->add_option("--poly", poly, "polynomial, e.g. x^2-x-1 or [-1,2]")->required();

  std::string measure_file, level, p_text = "1/2", scales = "2^-1..2^-10";
  int level_l = 8;
  auto* entropy = app.add_subcommand("entropy", "entropy profile of a measure across scales");
  entropy->add_option("--measure", measure_file, "measure JSON file");
  entropy->add_option("--level", level, "λ (rational or polynomial with one root in (0,1))");
  entropy->add_option("--p", p_text, "sign probability");
  entropy->add_option("--l", level_l, "level");
  entropy->add_option("--scales", scales, "comma list of scales or 2^a..2^b");

  std::string rules;
  std::size_t n_inst = 20;
  std::string repro_dir = "bc_repro";
  int log2_n_max = 0;
  auto* verify_cmd = app.add_subcommand("verify", "randomized property suite");
  verify_cmd->add_option("--rules", rules, "comma list of rule ids (default all)");
  verify_cmd->add_option("--n", n_inst, "instances per rule");
  verify_cmd->add_option("--repro-dir", repro_dir, "directory for failure reproducers ('' disables)");
  verify_cmd->add_option("--log2-n-max", log2_n_max, "largest log2 N used by generators");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "explicit absolute-continuity criteria");
  check->add_option("--criterion", ca.criterion,
                    "explicit|rational|nth-root|sparse|general|rational-boundary|nth-root-threshold|sparse-threshold|"
                    "mahler-bounds|dobrowolski|gaussian-gap");
  check->add_option("--a", ca.a);
  check->add_option("--b", ca.b);
  check->add_option("--p", ca.p);
  check->add_option("--n", ca.n);
  check->add_option("--k", ca.k);
  check->add_option("--poly", ca.poly);
  check->add_option("--lambda", ca.lambda);
  check->add_option("--c", ca.c);
  check->add_option("--eps", ca.eps);
  check->add_option("--batch", ca.batch, "CSV of (polynomial, p) rows for the explicit criterion");

  std::string study_lambda, study_p = "1/2";
  int lmax = 0, n_max = 10;
  bool h_flag = false, sep_flag = false, decay_flag = false;
  auto* study = app.add_subcommand("study", "Garsia entropy, separation and decay studies");
  study->add_option("--lambda", study_lambda)->required();
  study->add_option("--p", study_p);
  study->add_option("--lmax", lmax)->required();
  study->add_flag("--garsia", h_flag, "entropy per level (default)");
  study->add_flag("--separation", sep_flag, "separation rate per level");
  study->add_flag("--decay", decay_flag, "decay profile at L = lmax");
  study->add_option("--nmax", n_max, "finest decay scale 2^-nmax");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  try {
    if (*mahler) return cmd_mahler(cfg, poly);
    if (*entropy) return cmd_entropy(cfg, measure_file, level, p_text, level_l, scales);
    if (*verify_cmd) return cmd_verify(cfg, rules, n_inst, repro_dir, log2_n_max);
    if (*check) return cmd_check(cfg, ca);
    if (*study) return cmd_study(cfg, study_lambda, study_p, lmax, sep_flag, decay_flag, n_max);
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kVerifyFail;
  }
  return kUsage;
}
