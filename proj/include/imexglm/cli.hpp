#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace imexglm {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the command-line tool. args[0] is the program name. Commands:
/// check, tableau, region, locus, optimize, integrate, converge.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imexglm
