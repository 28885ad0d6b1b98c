#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ctgn {

/// Process exit codes of the ctgn tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitFormat = 4,
  kExitModel = 5,
};

/// Environment variable naming the default model path.
inline constexpr const char* kModelPathEnv = "CTGN_MODEL";

/// Runs one ctgn command. `args[0]` is the program name.
int run_cli(std::span<const std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace ctgn
