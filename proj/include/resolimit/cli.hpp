#pragma once

namespace resolimit {

// Full command-line driver; linked into the library so tests can run
// subcommands in-process. Returns the process exit code: 0 success,
// 2 validation/usage error, 1 numerical failure.
int cli_main(int argc, char** argv);

}  // namespace resolimit
