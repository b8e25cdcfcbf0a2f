// errors.hpp — exception kinds that map onto CLI exit codes

#pragma once

#include <stdexcept>
#include <string>

namespace mqb {

// File or configuration could not be read/validated (CLI exit 2).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical routine failed to reach its tolerance (CLI exit 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested mapping/experiment is not realizable on the hardware (CLI exit 4).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mqb
