#pragma once

#include <stdexcept>
#include <string>

namespace dtc {

// Input rejected by a contract check (bad L, wrong orientation count, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested system size exceeds what the evolution or dense paths support.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dtc
