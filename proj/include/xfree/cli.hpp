#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xfree {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitPrecondition = 2,
  kExitBudget = 3,
  kExitUnknownCommand = 64,
  kExitParse = 65,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xfree
