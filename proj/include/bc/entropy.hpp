// Shannon entropy, entropy at a scale and the derived predicates. All
// logarithms are base 2. Measures of total mass p < 1 follow the convention
// H(μ) = p·H(μ/p), i.e. Σ F(m_i) − F(p) with F(x) = −x log x.
#pragma once

#include "bc/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bc {

struct EntropyValue {
  long double value = 0;
  /// Bound on accumulated rounding (and quantization, when used).
  long double abs_error = 0;
};

EntropyValue shannon(const DiscreteMeasure& mu);

/// H(μ; r) = ∫_0^1 H(⌊X/r + t⌋) dt by an exact breakpoint sweep.
EntropyValue scale_entropy(const DiscreteMeasure& mu, const Rational& r);
/// H(X + I_r) − log r from the piecewise-constant density of X + I_r.
EntropyValue scale_entropy_via_smoothing(const DiscreteMeasure& mu, const Rational& r);
/// H(μ; r1) − H(μ; r2).
EntropyValue cond_entropy(const DiscreteMeasure& mu, const Rational& r1, const Rational& r2);
/// (1/M) Σ_a H(μ|[a+1, a+M]) for μ supported on ℤ.
EntropyValue z_block_entropy(const DiscreteMeasure& mu, long M);
/// Binary entropy of the split μ(−∞,0) | μ[0,∞).
EntropyValue hpm(const DiscreteMeasure& mu);
/// log r⁻¹ − H(μ; r).
EntropyValue garsia_diagnostic(const DiscreteMeasure& mu, const Rational& r);

/// Dyadic rational t with t ≈ 2^σ (64 significant bits); σ ↦ σ+1 doubles t exactly.
Rational dyadic_scale(const Rational& sigma);

/// Samples of σ ↦ H(μ; 2^σ | 2^{σ+1}) on the grid σ_lo + j·step.
struct EntropyProfile {
  std::vector<Rational> sigma;
  std::vector<Rational> t;
  std::vector<long double> values;
  std::vector<long double> errors;
  Rational step;
  double lipschitz = 4;
  /// H(μ; t_j) for j = 0 .. size()+1/step; values[j] = scale_values[j] − scale_values[j + 1/step].
  std::vector<long double> scale_values;
};

/// step must be 1/N for a positive integer N.
EntropyProfile entropy_profile(const DiscreteMeasure& mu, const Rational& sigma_lo, const Rational& sigma_hi,
                               const Rational& step);
/// A profile from given values (synthetic or external); scale_values left empty.
EntropyProfile make_profile(const Rational& sigma_lo, const Rational& step, std::vector<long double> values);

std::string profile_to_csv(const EntropyProfile& p);

struct LevelSetCount {
  long lo = 0;
  long hi = 0;
};
/// Bounds on N₁{σ ∈ [σ2, σ1] : H(μ; 2^σ | 2^{σ+1}) > 1 − α} from the 4-Lipschitz bound,
/// tightened by the cell bounds when the profile carries scale values.
LevelSetCount separated_level_set_count(const EntropyProfile& profile, long double alpha, const Rational& sigma2,
                                        const Rational& sigma1);

enum class KHeStatus { Holds, Fails, Undecided };
std::string to_string(KHeStatus s);

struct KHeResult {
  KHeStatus status = KHeStatus::Undecided;
  bool vacuous = false;
  long double threshold = 0;
  /// log2 of the window endpoints around log2 r.
  long double log_lo = 0, log_hi = 0;
  /// Smallest certified lower bound over the window.
  long double certified_min = 0;
  /// Smallest grid value over the window.
  long double grid_min = 0;
  std::optional<Rational> witness_t;
};

/// k-th high entropy inequality at scale r: H(μ;t|2t) ≥ 1 − 2^{−(2^k+3k+A)} for
/// |log t − log r| ≤ A(2 + logloglog r⁻¹ − k)·loglog r⁻¹. Requires r < 2^{−4}.
KHeResult k_he_check(const DiscreteMeasure& mu, const Rational& r, int k, int A, const Rational& step = Rational(1, 16));

/// Certified lower bound of H(μ; 2^s | 2^{s+1}) for s in grid cell j of a profile
/// with scale_values, using monotonicity and the 2-Lipschitz bound of σ ↦ H(μ; 2^σ).
long double cell_lower_bound(const EntropyProfile& p, std::size_t j);
long double cell_upper_bound(const EntropyProfile& p, std::size_t j);

}  // namespace bc
