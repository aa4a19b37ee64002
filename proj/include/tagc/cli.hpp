#pragma once

#include <iosfwd>

namespace tagc {

// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitStage = 3, kExitTransport = 4 };

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tagc
