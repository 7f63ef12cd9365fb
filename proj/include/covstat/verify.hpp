#pragma once

#include <string>
#include <vector>

namespace covstat {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// The fast exact and analytic identities: divisor-sum covariance, the worked
// cross-moment example, hom counts by enumeration, the h_hat and E_T[cos]
// identities and GUE halving.
std::vector<CheckResult> identity_checks();

}  // namespace covstat
