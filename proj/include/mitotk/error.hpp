#pragma once

#include <stdexcept>
#include <string>

namespace mitotk {

// Data/contract errors: bad input files, violated preconditions, malformed
// configuration. The CLI maps these to exit code 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mitotk
