#pragma once

namespace moldiff::cli {

// Entry point of the moldiff tool. Parses a subcommand plus key=value flags,
// resolves presets and config files, runs the requested scan and emits CSV,
// PGM and summary artifacts. Returns the process exit code:
//   0  success
//   1  selfcheck reported failures
//   2  usage, config or I/O error
//   3  physics configuration error
int run(int argc, const char* const* argv);

}  // namespace moldiff::cli
