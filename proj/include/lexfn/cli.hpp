#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lexfn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand (train, eval, ablate, neighbors, glf, export). `args`
/// excludes the program name. Failures print `error: <category>: <message>`
/// on `err` and return a nonzero exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexfn::cli
