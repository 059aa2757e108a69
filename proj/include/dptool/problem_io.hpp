#pragma once

#include <iosfwd>

#include "dptool/types.hpp"

namespace dptool {

// Parses a problem spec file (JSON, UTF-8). Unknown keys are rejected at
// every level. Throws FileError for unreadable paths and FormatError for
// malformed documents; structural rule violations are left to
// validate_problem.
DecisionProblem load_problem(const std::string& path);

// Same schema, from an in-memory document.
DecisionProblem problem_from_json_text(const std::string& text);

} // namespace dptool
