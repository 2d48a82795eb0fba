#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfsem::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitRuntime = 2,
  kExitMismatch = 3,
};

// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace sfsem::cli
