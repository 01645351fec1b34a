// SPDX-License-Identifier: Apache-2.0

// sectorctl entry point, callable in-process for tests.

#pragma once

#include <iosfwd>

#include "sectorial/errors.hpp"

namespace sectorctl {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,
  kExitValidation = 2,
  kExitCheckFailed = 3,
  kExitNumeric = 4,
};

/// Input problems map to kExitValidation, solver failures to kExitNumeric.
int exit_code_for(sectorial::ErrorCode code);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sectorctl
