// Constructive decompositions: the L²/L¹ split of near-uniform measures on
// [1, N], extraction of equal-weight pairs at a given scale, and clustering
// of supports into well separated short intervals.
#pragma once

#include "bc/report.hpp"

#include <optional>
#include <vector>

namespace bc {

/// μ = f + g on [1, N] ∩ ℤ with f ≤ 2/N pointwise.
struct L2L1Split {
  DiscreteMeasure f;
  DiscreteMeasure g;
  long N = 0;
  Rational f_dist_sq;  // ‖f − χ_N‖₂²
  Rational f_sup;      // ‖f‖∞
  Rational f_l1;
  Rational g_l1;
  long double missing_entropy = 0;  // log N − H(μ)
};

/// f(n) = μ(n) if μ(n) ≤ 2/N, else 1/N; g = μ − f. Throws std::logic_error if
/// one of the four bounds fails, std::invalid_argument on support outside [1, N].
L2L1Split l2_l1_split(const DiscreteMeasure& mu, long N);

/// log M − H(μ) ≤ 2M‖μ − χ_M‖₂² for a probability measure on [1, M] ∩ ℤ.
VerificationReport l2_entropy_bound(const DiscreteMeasure& mu, long M, long double tol = 1e-9L);

/// Equal-mass two-point measure mass·(δ_a + δ_b).
struct BernoulliPair {
  Position a;
  Position b;
  Rational mass_each;
  Rational mass() const { return 2 * mass_each; }
  /// (a + b)/2 and b − a as coefficient vectors in the owner's basis.
  std::vector<Rational> center() const;
  std::vector<Rational> distance() const;
  DiscreteMeasure measure() const;
};

struct BernoulliDecomposition {
  DiscreteMeasure residual;
  std::vector<BernoulliPair> pairs;
  Rational r;
  Rational extracted;  // Σ ‖η_i‖
  bool hypothesis = false;  // H(μ;r/2|r) ≤ 1.5·H(μ;r|2r)
  long double h = 0;        // H(μ; r|2r)
  long double bound = 0;    // (1/128)·h/(log h⁻¹ + 1)

  /// residual + Σ pairs.
  DiscreteMeasure reconstruct() const;
  nlohmann::json to_json() const;
};

/// Greedy extraction of pairs at distance in [r/2, 2r]: nearest in-band pair
/// first, ties by leftmost atom; the smaller mass moves into a pair. When the
/// hypothesis holds the 1/128 mass bound is asserted (std::logic_error).
BernoulliDecomposition bernoulli_extract(const DiscreteMeasure& mu, const Rational& r);

/// True if some two atoms lie at a distance in [r/2, 2r].
bool has_in_band_pair(const DiscreteMeasure& mu, const Rational& r);

/// Minimal residual mass over all extraction orders (exhaustive; ≤ 12 atoms).
Rational exhaustive_min_residual(const DiscreteMeasure& mu, const Rational& r);

struct Cluster {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive atom indices
};

/// Maximal runs of atoms with consecutive gaps < r1; nullopt (REJECT) if a run
/// has diameter > r0. Requires r1 ≥ 4·r0.
std::optional<std::vector<Cluster>> support_clusters(const DiscreteMeasure& mu, const Rational& r0, const Rational& r1);

/// H(μ; r/2|r) − 2·H(μ; r|2r).
EntropyValue doubling_defect(const DiscreteMeasure& mu, const Rational& r);

/// Exact sign of position(j) − position(i) − c.
int sign_of_gap_minus(const DiscreteMeasure& mu, std::size_t i, std::size_t j, const Rational& c);

}  // namespace bc
