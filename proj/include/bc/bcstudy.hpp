// Studies specific to Bernoulli convolutions: Garsia entropy estimates,
// separation of the level-l sums, full-entropy scales, factorization over
// index intervals and the multi-scale decay profile.
#pragma once

#include "bc/report.hpp"

#include <vector>

namespace bc {

struct LevelStat {
  int l = 0;
  EntropyValue H;            // shannon(μ^{(λ^l,1]})
  long double ratio = 0;     // H/l
  std::size_t atoms = 0;
  RationalInterval min_gap;  // empty-width [0,0] for a single atom
  long double diameter = 0;
};

struct HLambdaEstimate {
  AlgebraicPtr lambda;
  Rational p;
  std::vector<LevelStat> levels;
  MahlerEnclosure mahler;

  nlohmann::json to_json() const;
  /// l,H,ratio,atoms
  std::string to_csv() const;
};

/// Levels 1..l_max. Throws std::invalid_argument unless 0 < p < 1, ResourceLimit past `bound`.
HLambdaEstimate h_estimate(const AlgebraicPtr& lambda, const Rational& p, int l_max, int bound = 26);

/// log2 of the Mahler enclosure endpoints.
long double log2_mahler_lo(const MahlerEnclosure& m);
long double log2_mahler_hi(const MahlerEnclosure& m);

/// Lower bound c0·min(log M, 1) at the largest level (p = 1/2 only), the
/// non-increasing trend of H_l/l, and the upper bound min(1, log M) + slack with
/// slack = (d·log l + log C_fit)/l, C_fit fitted from the observed gaps. The
/// slack is a heuristic and the note says so.
VerificationReport h_bounds_check(const HLambdaEstimate& est, long double c0 = 0.44L);

struct SeparationReport {
  int l = 0;
  std::size_t atoms = 0;
  RationalInterval min_gap;
  long double rate = 0;          // −log2(min_gap)/l
  long double log_mahler = 0;
  long double garsia_rate = 0;   // log M + d·log(l)/l
  bool distinct = false;         // min_gap > 0
  bool window_applies = false;   // l ≥ 15
  bool in_window = false;        // |rate − log M| ≤ 0.15
  bool pass = false;

  nlohmann::json to_json() const;
};

SeparationReport separation_check(const AlgebraicPtr& lambda, const Rational& p, int l, int bound = 26);

/// When min_gap > α^l, H(μ; α^l) must equal H(μ). Throws std::invalid_argument
/// unless α·M < 1 is certified.
VerificationReport full_entropy_scale_check(const AlgebraicPtr& lambda, const Rational& p, int l, const Rational& alpha,
                                            int bound = 26);

/// μ^{(λ^L,1]} against the convolution of the pieces cut out by `parts` and the
/// remainder. Throws std::invalid_argument if two parts overlap.
VerificationReport factorization_check(const AlgebraicPtr& lambda, const Rational& p, const std::vector<LevelInterval>& parts,
                                       int L, int bound = 26);

struct DecayProfile {
  int L = 0;
  std::vector<int> n;
  std::vector<long double> values;  // H(μ; 2^{−n} | 2^{−n+1})
  std::vector<long double> errors;
  long double fit_C = 0;            // least squares of 1 − value ≈ C·n^{−2}
  long double h_est = 0;            // H(μ)/L
  long double dim_estimate = 0;     // min(−h_est / log λ, 1), diagnostic only
  RationalInterval min_gap;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// n = 1..n_max. Throws std::invalid_argument unless 2^{−n_max} ≥ 8·min_gap.
DecayProfile decay_profile(const AlgebraicPtr& lambda, const Rational& p, int L, int n_max, int bound = 26);

}  // namespace bc
