// Acceptance runner: one pass/fail line per criterion, nonzero exit on any
// failure. Also reachable through `encircle verify`.
#include <cstdio>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
    const std::string filter = argc > 1 ? argv[1] : "";
    const auto results = encircle::accept::run_acceptance(filter);
    bool all_passed = !results.empty();
    for (const auto& r : results) {
        std::printf("%s criterion %d: %s — %s\n", r.passed ? "PASS" : "FAIL", r.number,
                    r.name.c_str(), r.detail.c_str());
        all_passed = all_passed && r.passed;
    }
    if (results.empty()) std::printf("no criteria matched the filter\n");
    return all_passed ? 0 : 1;
}
