#pragma once

#include <stdexcept>
#include <string>

namespace mim {

// Raised when an operation declines to run because the instance exceeds a
// stated resource cap (brute force beyond n=16, exact solves beyond n=60,
// exact-rational arithmetic beyond n=64, regime preconditions on checks).
// The CLI maps this to exit code 2; it is distinct from malformed input
// (std::invalid_argument) and out-of-domain arguments (std::domain_error),
// which map to exit code 1.
class refusal_error : public std::runtime_error {
public:
    explicit refusal_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mim
