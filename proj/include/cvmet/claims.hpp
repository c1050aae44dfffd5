#pragma once

// Regression driver for the acceptance criteria.

#include <string>
#include <vector>

#include "cvmet/cli.hpp"

namespace cvmet {

struct ClaimResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Criteria 1-9. Parameters not fixed by the criteria themselves (optomech
/// defaults, dimension loop) come from cfg.
std::vector<ClaimResult> run_claims(const RunConfig& cfg);

}  // namespace cvmet
