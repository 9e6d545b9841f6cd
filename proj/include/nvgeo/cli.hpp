#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nvgeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `nvgeo` tool; argv[0] is the program name.
/// Subcommands: rabi, ramsey, fid, echo-decay, refocus, t2-scan, dimer-hist, bath-gen.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace nvgeo::cli
