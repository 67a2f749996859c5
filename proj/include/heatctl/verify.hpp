#pragma once

#include <string>
#include <vector>

namespace heatctl {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // measured numbers, shown either way
};

/// Run the whole invariant suite (every module). Deterministic; roughly a
/// minute of desk-scale computation.
std::vector<CheckResult> run_invariant_suite();

} // namespace heatctl
