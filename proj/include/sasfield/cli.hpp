// Command-line front end: analyze, simulate, converge and golden.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sasfield {

enum ExitCode : int {
    exit_pass = 0,
    exit_assertion_failure = 1,
    exit_config_error = 2,
    exit_domain_error = 3,
};

/// Runs one invocation; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sasfield
