#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace divpot::cli {

/// Exit codes: 0 ok, 1 validation, 2 I/O, 3 numeric.
enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kNumeric = 3 };

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace divpot::cli
