#ifndef ZPSYNC_TOOLS_CLI_HPP
#define ZPSYNC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace zpsync::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zpsync::cli

#endif  // ZPSYNC_TOOLS_CLI_HPP
