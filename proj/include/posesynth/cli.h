#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace posesynth {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs the posesynth command line (args excludes the program name). Normal
// output goes to `out`, progress and diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace posesynth
