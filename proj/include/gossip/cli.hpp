#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gossip {

// One command-line invocation (argv without the program name); output and
// diagnostics go to the given streams. Exit code 0 is a success or confirmed
// property, 1 an honest negative verdict, 2 a usage, file, or parse problem.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gossip
