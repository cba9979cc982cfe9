#pragma once

namespace wildgan {

// Parses argv and runs one subcommand. Throws the module error types; the
// binary's main() maps them to exit codes (usage 2, validation 3, numeric 4).
int run_cli(int argc, char** argv);

}  // namespace wildgan
