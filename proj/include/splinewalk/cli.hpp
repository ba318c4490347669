#pragma once

namespace splinewalk {

// Full command-line front end. Returns the process exit code:
// 0 success, 1 I/O failure, 2 usage/configuration error.
int run_command(int argc, const char* const* argv);

}  // namespace splinewalk
