#pragma once

#include <string>
#include <vector>

namespace tubular::cli {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};

// Cross-route identity suite: intrinsic vs extrinsic curvature, frame
// transport, angular-momentum algebra, well-depth forms, kinetic orderings,
// and reflection symmetry of cross-sections.
std::vector<CheckResult> run_identity_checks();

}  // namespace tubular::cli
