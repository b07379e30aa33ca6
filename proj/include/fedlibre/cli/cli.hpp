#pragma once

#include "fedlibre/harvester/transport.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fedlibre::cli {

/// Exit codes of the operator CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; // operational error, "error: <Code>: <message>" on err
inline constexpr int kExitUsage = 2;

struct CliContext {
    std::ostream& out;
    std::ostream& err;
    /// Transport for harvests; a real HTTP client when null.
    harvester::HttpTransport* transport = nullptr;
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, const CliContext& context);

} // namespace fedlibre::cli
