#pragma once

#include <stdexcept>
#include <string>

namespace nk {

// Thrown when a request is structurally valid but too large for the exact
// engines (full enumeration past the supported genome length, exhaustive
// landscapes past the table guard, and so on).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

// Thrown when an iterative numeric routine cannot meet its contract:
// a root bracket with no sign change, quadrature that fails to converge,
// or an internal overflow.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

} // namespace nk
