#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrviz::cli {

/// Runs the command line tool. Exit codes: 0 success, 1 validation or data
/// error, 2 usage error. Diagnostics go to `err`, results to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrviz::cli
