#ifndef LABMINE_CLI_HPP_
#define LABMINE_CLI_HPP_

namespace labmine {

// Parses and executes one command line. Returns the process exit code:
// 0 success, 1 usage error, 2 data error.
int run_cli(int argc, const char* const* argv);

}  // namespace labmine

#endif  // LABMINE_CLI_HPP_
