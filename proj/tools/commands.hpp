#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcekit::cli {

/// Runs the command-line front end; returns the process exit code.
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcekit::cli
