#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitTolerance = 2;

/// Entry point shared by the `ifm` binary and the tests. `args` excludes the
/// program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifm::cli
