#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msv::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kBackendError = 3,
  kVerificationFailed = 4,
};

// Runs `msv <subcommand> ...`; args exclude the program name. Warnings go
// to `err` while the command runs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msv::cli
