// Outcome of checking one inequality on one instance.
#pragma once

#include "bc/entropy.hpp"

#include <json.hpp>

#include <string>

namespace bc {

struct VerificationReport {
  std::string rule;
  std::string digest;  // hex digest of the instance
  EntropyValue lhs;
  EntropyValue rhs;
  /// rhs − lhs for inequalities lhs ≤ rhs; −|lhs − rhs| for equalities.
  long double margin = 0;
  bool hypothesis_satisfied = true;
  bool pass = true;
  std::string note;

  bool vacuous() const { return !hypothesis_satisfied; }
  nlohmann::json to_json() const;
};

/// Fills margin, pass from lhs ≤ rhs (or lhs = rhs) at the given tolerance,
/// widened by the accumulated rounding bounds of both sides.
void settle_inequality(VerificationReport& rep, long double tol);
void settle_equality(VerificationReport& rep, long double tol);

}  // namespace bc
