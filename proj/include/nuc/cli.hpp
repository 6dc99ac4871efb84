#pragma once

#include "nuc/settings.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nuc {

/// Runs the `nuc` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on bad input or usage, 2 on remote or IO failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env);

}  // namespace nuc
