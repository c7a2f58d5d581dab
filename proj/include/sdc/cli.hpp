#pragma once

#include <ostream>

namespace sdc::io {

inline constexpr int exit_sdc = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_not_sdc = 2;

/// Runs one `sdc` command line. Reports go to `out`, one-line diagnostics to
/// `err`. Returns 0 for SDC (or a passed verification, or a successful gen),
/// 2 for NOT_SDC (or a failed verification), 1 for any error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdc::io
