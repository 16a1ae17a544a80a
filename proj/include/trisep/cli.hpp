// cli.hpp: the `trisep` command line.
//
// Exit codes: 0 success / PPT / verified, 1 negative verdict (NPT, failed
// verification), 2 refusal (a library precondition failed; the error name is
// printed), 3 unreadable or malformed file. Usage errors keep CLI11's codes.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trisep {

enum ExitCode : int {
  kExitOk = 0,
  kExitNegative = 1,
  kExitRefused = 2,
  kExitFormat = 3,
};

// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trisep
