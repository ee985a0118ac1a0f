#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rpid {

enum class CheckStatus { pass, fail, warn, waived };

struct CheckResult {
  std::string id;
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::string detail;
};

/// Run the full acceptance suite (fixed-gain trajectory checks, rolling
/// convergence, optimizer dominance against a brute-force grid, identifier
/// round-trip, pipeline convergence, overshoot check, property suites).
std::vector<CheckResult> run_acceptance();

/// Print one line per criterion; returns the process exit status
/// (nonzero iff a hard criterion failed; warn/waived do not fail).
int run_acceptance_cli(std::ostream& out);

}  // namespace rpid
