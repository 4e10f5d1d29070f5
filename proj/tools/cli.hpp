#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fpc/error.hpp"
#include "verify.hpp"

namespace fpc::cli {

/// Process exit codes. One per error class; see README.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kInvalidArgument = 3,
  kDimensionMismatch = 4,
  kIo = 5,
  kDataFormat = 6,
  kEmptyData = 7,
  kModelFormat = 8,
  kOverflow = 9,
  kNumerical = 10,
  kVerifyFailed = 11,
};

int exit_code(ErrorKind kind) noexcept;

/// Test seams. `prox` replaces the hinge prox inside `verify`.
struct Hooks {
  ScalarProx prox;
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks = {});

}  // namespace fpc::cli
