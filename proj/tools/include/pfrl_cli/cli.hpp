#ifndef PFRL_CLI_CLI_HPP_
#define PFRL_CLI_CLI_HPP_

#include <iosfwd>

namespace pfrl::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kRuntimeFailure = 2,
};

// Entry point behind the `pfrl` executable; messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace pfrl::cli

#endif  // PFRL_CLI_CLI_HPP_
