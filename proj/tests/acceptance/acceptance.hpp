#pragma once

#include <string>
#include <vector>

namespace encircle::accept {

struct CriterionResult {
    int number{0};
    std::string name;
    bool passed{false};
    std::string detail;
};

// Scenario directory: ENCIRCLE_SCENARIO_DIR env var when set, otherwise the
// build-time default (the repository's scenarios/ folder).
std::string scenario_dir();

// Run every criterion whose name contains `filter` (all when empty). Results
// come back in criterion order; runs are cached so criteria can share logs.
std::vector<CriterionResult> run_acceptance(const std::string& filter = "");

}  // namespace encircle::accept
