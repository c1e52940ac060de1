#pragma once

#include <ostream>

namespace bjcc::cli {

// Entry point of the `bjcc` tool. Subcommands: consistency, feasibility,
// rate, region, fit. Returns 0 on success, 1 on configuration or I/O errors
// and the CLI11 exit code on usage errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bjcc::cli
