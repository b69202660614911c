#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace capnet {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the full acceptance suite, printing one pass/fail line per criterion
// to `log` as results land. `jobs` bounds worker threads for the sweeps.
std::vector<CriterionResult> run_acceptance(uint32_t jobs, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace capnet
