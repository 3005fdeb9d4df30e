#pragma once

#include <iosfwd>

namespace ineqforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitViolations = 2;

/// Runs one command line (argv[0] is the program name). Artifacts are only
/// written once every input has been validated, so a failing run leaves no
/// files behind.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ineqforge::cli
