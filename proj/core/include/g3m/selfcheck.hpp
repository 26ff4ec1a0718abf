#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace g3m::selfcheck {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Property suites for all three math modules at quick scale. Used by the
// `validate` command; the test suite runs the same properties at full scale.
std::vector<CheckResult> run_all(std::uint64_t seed = 20240801ULL);

} // namespace g3m::selfcheck
