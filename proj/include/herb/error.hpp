#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace herb {

/// Input violates a format rule or a domain invariant (CLI exit code 2).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-fatal findings collected while loading or computing.
using Warnings = std::vector<std::string>;

} // namespace herb
