#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Runs one `mmopt` invocation; `args` excludes the program name.
// Subcommands: closed-form, eval, train, certify, heatmap, measure, compare.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amm
