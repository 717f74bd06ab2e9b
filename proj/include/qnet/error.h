#pragma once

#include <stdexcept>
#include <string>

namespace qnet {

/// A parameter outside its documented range.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No path exists between two nodes.
class NoPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An objective that no amount of backoff can ever schedule.
class InfeasibleObjective : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration; `what()` names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qnet
