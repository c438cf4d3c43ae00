#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fgl {

// One measured quantity against its tolerance; pass iff value <= tolerance.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Check> checks;
  double seconds = 0.0;
  double time_limit = 0.0;
  bool pass = false;
  // Worst value/tolerance ratio over the checks (0-tolerance checks count 0 or infinity).
  double worst_ratio = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20241;
};

int acceptance_count();
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace fgl
