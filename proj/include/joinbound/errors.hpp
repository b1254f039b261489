#pragma once

#include <stdexcept>
#include <string>

namespace joinbound {

// Error categories map 1:1 onto the CLI exit-code contract
// (0 ok / 1 verify-fail / 2 parse / 3 caps / 4 invalid construction).

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CapError : std::runtime_error {
    explicit CapError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace joinbound
