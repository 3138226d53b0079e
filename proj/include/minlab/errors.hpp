#pragma once

#include <stdexcept>
#include <string>

namespace minlab {

/// Invalid user-supplied configuration (bad flag, malformed config file,
/// inconsistent parameters). Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure the solver cannot recover from (winding bound hit,
/// non-finite value). Mapped to exit code 3 by the CLI.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace minlab
