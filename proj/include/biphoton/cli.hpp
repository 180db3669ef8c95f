#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biphoton {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitNonConvergence = 4;

// Runs one subcommand (tunability, jsi, hom, hom-fp, fit, tomo). args excludes
// the program name. Results go to `out` unless an output path is configured;
// failures are reported on `err` as a single JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biphoton
