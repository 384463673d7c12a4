#pragma once

#include <iosfwd>

namespace mpcert::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 1,
    kUnresolved = 2,
    kValidationMismatch = 3,
};

/// Runs one mpcert command line. Diagnostics go to `err`, results to `out`.
int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace mpcert::cli
