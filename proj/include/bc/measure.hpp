// Finitely supported measures with exact positions and masses.
#pragma once

#include "bc/algebraic.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace bc {

/// A point of ℝ: a rational, or Σ coeffs_j λ^j for the owner's λ.
struct Position {
  AlgebraicPtr owner;              // null for rational positions
  std::vector<Rational> coeffs;    // length 1 for rational, deg(owner) otherwise

  static Position rational(const Rational& q) { return {nullptr, {q}}; }
  static Position algebraic(AlgebraicPtr owner, std::vector<Rational> coeffs);
};

/// Atoms sorted by value, pairwise distinct, with positive masses.
///
/// Storage is struct-of-arrays: position i is (Σ_j coord(i,j) λ^j) / D with a
/// common integer denominator D, and mass i is weight(i) / W. Both fractions
/// are kept in lowest terms across the whole measure.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// General constructor: merges repeated positions, sorts, drops zero masses.
  static DiscreteMeasure from_atoms(const std::vector<Position>& positions, const std::vector<Rational>& masses);
  static DiscreteMeasure from_rational_atoms(const std::vector<std::pair<Rational, Rational>>& atoms);
  /// Integer coordinates with common denominators; any order, repeats merged.
  static DiscreteMeasure from_raw(AlgebraicPtr owner, int dim, Integer pos_den, std::vector<Integer> coords,
                                  Integer mass_den, std::vector<Integer> weights);

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  const AlgebraicPtr& owner() const { return owner_; }
  bool is_rational() const { return owner_ == nullptr; }
  int dim() const { return dim_; }

  const Integer& pos_den() const { return pos_den_; }
  const Integer& coord(std::size_t i, int j = 0) const { return coords_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j)]; }
  const std::vector<Integer>& coords() const { return coords_; }
  const Integer& mass_den() const { return mass_den_; }
  const Integer& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Integer>& weights() const { return weights_; }

  Rational position_rational(std::size_t i) const;
  std::vector<Rational> position_coeffs(std::size_t i) const;
  Position position(std::size_t i) const;
  Rational mass(std::size_t i) const;
  Rational total_mass() const;

  /// Long double approximation of position i and a rigorous bound on its error.
  long double approx(std::size_t i) const { return approx_[i]; }
  long double approx_error(std::size_t i) const { return err_[i]; }
  Interval position_enclosure(std::size_t i, mpfr_prec_t prec) const;
  /// Sign of position(i) − position(k), exact.
  int compare_positions(std::size_t i, std::size_t k) const;

  /// Rational measure whose positions are all integers.
  bool integer_supported() const;

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);

  nlohmann::json to_json() const;
  static DiscreteMeasure from_json(const nlohmann::json& j);

 private:
  friend struct MeasureBuilder;
  AlgebraicPtr owner_;
  int dim_ = 1;
  Integer pos_den_ = 1;
  std::vector<Integer> coords_;
  Integer mass_den_ = 1;
  std::vector<Integer> weights_;
  std::vector<long double> approx_;
  std::vector<long double> err_;
};

DiscreteMeasure dirac(const Position& x);
DiscreteMeasure bernoulli_pair(const Position& center, const Rational& distance, const Rational& mass);
DiscreteMeasure convolve(const DiscreteMeasure& a, const DiscreteMeasure& b);
/// Sum of two measures (masses add, total may exceed neither input's owner rules).
DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b);
DiscreteMeasure scale_mass(const DiscreteMeasure& m, const Rational& c);
DiscreteMeasure affine(const DiscreteMeasure& m, const Rational& scale, const Rational& shift);
/// x ↦ −x.
inline DiscreteMeasure reflect(const DiscreteMeasure& m) { return affine(m, -1, 0); }

struct RealInterval {
  std::optional<Rational> lo, hi;  // nullopt = unbounded
  bool lo_closed = true;
  bool hi_closed = true;
  static RealInterval all() { return {}; }
  static RealInterval closed(const Rational& a, const Rational& b) { return {a, b, true, true}; }
};
DiscreteMeasure restrict(const DiscreteMeasure& m, const RealInterval& J);

/// Enclosure of the minimum distance between consecutive atoms.
RationalInterval min_gap(const DiscreteMeasure& m);

/// Endpoint of a level interval: a rational or the symbolic power λ^k.
struct LevelEndpoint {
  bool is_power = false;
  Rational value;
  int power = 0;
  bool closed = false;
  static LevelEndpoint rational(const Rational& q, bool closed) { return {false, q, 0, closed}; }
  static LevelEndpoint lambda_power(int k, bool closed) { return {true, Rational(0), k, closed}; }
};
struct LevelInterval {
  LevelEndpoint lo, hi;
  /// (λ^l, 1]
  static LevelInterval standard(int l) {
    return {LevelEndpoint::lambda_power(l, false), LevelEndpoint::rational(1, true)};
  }
};

/// Indices n ≥ 0 with λ^n ∈ I, ascending. Throws ResourceLimit past `bound`.
std::vector<int> level_indices(const AlgebraicNumber& lambda, const LevelInterval& I, int bound = 26);
/// Law of Σ_{n ∈ S} ξ_n λ^n with P(ξ = 1) = p.
DiscreteMeasure level_measure(const AlgebraicPtr& lambda, const Rational& p, const LevelInterval& I, int bound = 26);
DiscreteMeasure level_measure_indices(const AlgebraicPtr& lambda, const Rational& p, const std::vector<int>& indices);

enum class MassProfile { Uniform, Random, Dirichlet };
/// Distinct rational positions in [0, span] on the grid span/(64·n_atoms)·ℤ; masses sum to 1.
DiscreteMeasure random_measure(std::uint64_t seed, std::size_t n_atoms, const Rational& span, MassProfile profile);
/// Masses on {offset, …, offset+n−1} (zeros dropped) with the given profile.
DiscreteMeasure random_integer_measure(Rng& rng, long offset, std::size_t n, MassProfile profile);

}  // namespace bc
