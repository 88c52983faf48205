#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsdp::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the full regression-and-property gate: fixture optima, rate
/// signatures, oracle equivalences, projection calculus, expansion bounds,
/// SOSC/growth, error-bound/calmness stability and the per-iteration update
/// identities. Prints one pass/fail line per criterion; returns the number
/// of failures.
int run_all(std::ostream& os);

std::vector<CriterionResult> run_criteria();

}  // namespace nlsdp::verify
