#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ahi {

enum class OutputFormat { csv, json, human };

/// Runs the command line front end. `args` excludes the program name.
/// Returns 0 on success, 1 on a computation error and 2 on a usage error.
/// The default output format is taken from the AHI_FORMAT environment
/// variable when set, else human.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ahi
