#pragma once

namespace aew {

// Parses argv, runs the selected subcommand, writes outputs.
// Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.
int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace aew
