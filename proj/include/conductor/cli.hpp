#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "conductor/framework.hpp"

namespace conductor {

/// Runs the `conduct` command line; `args` excludes the program name.
/// Returns the process exit code: 0 ok, 1 I/O or parse error, 2 domain error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string format_verdicts_table(const std::map<Phase, PhaseVerdict>& verdicts);

}  // namespace conductor
