#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tempsense::cli {

// Subcommands: detect, analyze, simulate, optimize, report.
// Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
// stderr; data goes to files or stdout.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

// Text summary of a results CSV: quartile table per window length, overall
// mean with confidence interval, ANOVA line, direction/significance tally.
std::string emit_report(const std::filesystem::path& results_csv);

}  // namespace tempsense::cli
