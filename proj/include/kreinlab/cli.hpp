#pragma once

namespace kreinlab::cli {

// Entry point of the kreinlab tool. Returns the process exit code:
//   0  everything ran and every check passed (or was merely inconclusive)
//   1  at least one check failed
//   2  configuration error; the violated constraint is named on stderr
int run(int argc, const char* const* argv);

}  // namespace kreinlab::cli
