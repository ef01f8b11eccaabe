#pragma once

#include <stdexcept>
#include <string>

namespace nvgrape {

// Invalid user-supplied parameters or configuration values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a result (singular system,
// step-size underflow, missing root, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be read, written or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nvgrape
