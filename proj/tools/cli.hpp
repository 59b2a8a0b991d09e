#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pap::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUserError = 1,  // usage, I/O, parse or type errors
  kBottom = 2,     // the requested result is bottom
};

/// Runs one `pap` command. args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pap::cli
