#pragma once

// Invariant suites behind `srl validate`. Each check reports a measured
// quantity against a pinned limit.

#include <string>
#include <vector>

#include "srl/closed_form.hpp"

namespace srl::cli {

struct CheckResult {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool pass = false;
};

/// closedform, simulator, pe, pi.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument on an unknown suite name.
std::vector<CheckResult> run_suite(const std::string& name, const ModelParams& params);

} // namespace srl::cli
