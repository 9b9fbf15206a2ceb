#pragma once

#include <functional>
#include <string>
#include <vector>

namespace carlsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the full acceptance suite. Criteria needing file output write under
/// scratch_dir. Exceptions inside a criterion mark it failed; they never
/// abort the suite. Some criteria take minutes; on_result, if set, is called
/// as each one finishes.
std::vector<CriterionResult> run_acceptance_suite(
    const std::string& scratch_dir,
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace carlsim
