#pragma once

#include <string>
#include <vector>

namespace mdcert {

/// Entry point behind the mdcert binary. Exit codes: 0 success, 1 usage or
/// configuration error, 2 no certificate found, 3 verification violation.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace mdcert
