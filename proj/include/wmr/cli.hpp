#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wmr {

/// Runs one `wmr` subcommand. args excludes the program name.
/// Exit codes: 0 success, 1 domain or solver failure, 2 parse or I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wmr
