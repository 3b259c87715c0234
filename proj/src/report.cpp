#include "bc/report.hpp"

#include <cmath>

namespace bc {

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["rule"] = rule;
  j["digest"] = digest;
  j["lhs"] = static_cast<double>(lhs.value);
  j["lhs_err"] = static_cast<double>(lhs.abs_error);
  j["rhs"] = static_cast<double>(rhs.value);
  j["rhs_err"] = static_cast<double>(rhs.abs_error);
  j["margin"] = static_cast<double>(margin);
  j["hypothesis_satisfied"] = hypothesis_satisfied;
  j["pass"] = pass;
  if (!note.empty()) j["note"] = note;
  return j;
}

void settle_inequality(VerificationReport& rep, long double tol) {
  rep.margin = rep.rhs.value - rep.lhs.value;
  rep.pass = !rep.hypothesis_satisfied || rep.margin >= -(tol + rep.lhs.abs_error + rep.rhs.abs_error);
}

void settle_equality(VerificationReport& rep, long double tol) {
  rep.margin = -std::fabs(rep.lhs.value - rep.rhs.value);
  rep.pass = !rep.hypothesis_satisfied || rep.margin >= -(tol + rep.lhs.abs_error + rep.rhs.abs_error);
}

}  // namespace bc
