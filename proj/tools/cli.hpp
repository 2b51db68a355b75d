#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace toric::cli {

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kVerdictFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kNumeric = 3;

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& subcommands();

/// Library operation -> the subcommand that exposes it.
const std::vector<std::pair<std::string, std::string>>& operation_registry();

}  // namespace toric::cli
