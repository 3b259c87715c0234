// Catalog of entropy inequalities as executable checks on concrete measures,
// instance generators, and a deterministic suite runner.
#pragma once

#include "bc/report.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bc {

namespace constants {
inline constexpr long double kHighEntropy = 1e8L;  // R7
inline constexpr long double kC6 = 6e4L;           // R8, product term
inline constexpr long double kC7 = 4000.0L;        // R8, M log M / N term
inline constexpr long double kC4 = 4e4L;           // R9, product term
inline constexpr long double kC5 = 3000.0L;        // R9, M log M / N term
inline constexpr long double kC1 = 1000.0L;        // R15
inline constexpr long double kL2L1Product = 8.0L;  // R16
inline constexpr long double kL2L1Tail = 6.0L;     // R16
/// R10: c in the level-set hypothesis is 1/(1000 log α⁻¹); c in the conclusion is α/(10^7 log α⁻¹).
long double low_entropy_c_hypothesis(long double alpha);
long double low_entropy_c_conclusion(long double alpha);
}  // namespace constants

/// Everything a rule needs; which fields are used depends on the rule.
struct Instance {
  std::vector<DiscreteMeasure> measures;
  std::vector<Rational> scales;
  std::vector<long> ints;
  std::vector<Rational> params;                  // α, β, ...
  std::vector<std::array<Rational, 3>> joint;    // (x, y, mass) of a joint law

  nlohmann::json to_json() const;
  static Instance from_json(const nlohmann::json& j);
  std::string digest() const;
};

struct GeneratorConfig {
  int log2_n_min = 6;
  int log2_n_max = 12;
  std::size_t max_atoms = 60;  // generic rules
};

struct Rule {
  std::string id;
  std::string name;
  std::string statement;
  std::string constants;
  std::function<Instance(std::uint64_t seed, const GeneratorConfig&)> generate;
  std::function<VerificationReport(const Instance&, long double tol)> check;
};

const std::vector<Rule>& rule_catalog();
/// Throws std::invalid_argument for an unknown id.
const Rule& find_rule(const std::string& id);

VerificationReport verify(const std::string& rule_id, const Instance& instance, long double tol = 1e-9L);

struct RuleSummary {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::size_t vacuous = 0;
  std::size_t failed = 0;
  /// Smallest margin among non-vacuous reports (NaN if none).
  long double worst_margin = 0;
  long double max_abs_margin = 0;
};

struct SuiteOptions {
  long double tol = 1e-9L;
  /// Directory for reproducer files; empty disables them.
  std::string repro_dir = "bc_repro";
};

struct SuiteResult {
  std::vector<VerificationReport> reports;  // rule-major, instance order
  std::map<std::string, RuleSummary> per_rule;
  RuleSummary total;
  std::vector<std::string> reproducers;
};

/// Instance k of rule R uses seed mix_seed(seed, hash(R) + k); results do not
/// depend on the thread count.
SuiteResult run_suite(const std::vector<std::string>& rule_ids, const GeneratorConfig& config, std::size_t n_instances,
                      std::uint64_t seed, const SuiteOptions& options = {});

nlohmann::json summary_to_json(const SuiteResult& result);

struct ScanEntry {
  Instance instance;
  VerificationReport report;
  long double ratio = 0;  // margin / max(|rhs|, tiny)
};
/// Non-vacuous instances with the smallest relative margin, ascending.
std::vector<ScanEntry> tightness_scan(const std::string& rule_id, const GeneratorConfig& config, std::size_t n_candidates,
                                      std::uint64_t seed, std::size_t keep = 5);

/// True if X ≤ Y ≤ X + d under some coupling of the two laws (quantile test).
bool admits_shift_coupling(const DiscreteMeasure& X, const DiscreteMeasure& Y, const Rational& d);

}  // namespace bc
