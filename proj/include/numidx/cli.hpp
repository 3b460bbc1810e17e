#pragma once

// Command-line front end: radius, index, mp, sweep and verify.
//
// Exit codes: 0 success / all checks passed, 1 a suite or sweep check was
// violated, 2 input error (bad flags, unparsable descriptor or matrix,
// documented size caps).
//
// Environment: NUMIDX_SEED overrides the default root seed, NUMIDX_THREADS
// the default worker count.

#include <iosfwd>
#include <string>

#include "numidx/experiments.hpp"

namespace numidx {

inline constexpr const char* kArtifactVersion = "1.0.0";

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// JSON text of a suite report (deterministic: no timestamps).
std::string suite_report_json(const SuiteReport& report);

/// Parses "a", "a..b" or "a..b:step" into the listed values. Throws ParseError
/// (naming `field`) on bad syntax and on an empty range.
std::vector<double> parse_range(const std::string& text, const std::string& field);

}  // namespace numidx
