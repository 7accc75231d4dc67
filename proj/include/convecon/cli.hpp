#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace convecon::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,      // bad flags, unreadable or invalid files, DomainError
  kNoOptimum = 3,       // NoInteriorOptimum, Unbounded, Diverged, Infeasible
  kInsufficientDesign = 4,
};

/// Runs one subcommand. `args` excludes the program name. Documents go to
/// the --out path when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace convecon::cli
