#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relaybc {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Randomized invariant suites over the core formulas, the mapping-matrix
// algebra, the convex kernel and the solver pipeline. The seed fixes every
// draw; identical seeds reproduce identical runs.
std::vector<SuiteResult> run_validation_suites(std::uint64_t seed);

}  // namespace relaybc
