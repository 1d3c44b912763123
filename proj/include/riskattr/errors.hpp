#pragma once

#include <stdexcept>
#include <string>

namespace riskattr {

/// Bad user input: malformed files, dimension mismatches, invalid options.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure: non-finite intermediates, guard violations, solver caps.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace riskattr
