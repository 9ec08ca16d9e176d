#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kConsistency = 3,
    kIo = 4,
    kNoData = 5,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascade::cli
