#pragma once

// The selftest suite: one entry per numbered acceptance check, runnable from
// the CLI (`powindex selftest`) and from the test harness.

#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace powidx::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// ids empty = all. When live != nullptr a line is printed as each finishes.
std::vector<CriterionResult> run(const std::set<int>& ids = {}, std::ostream* live = nullptr);

std::string format_line(const CriterionResult& r);

}  // namespace powidx::acceptance
