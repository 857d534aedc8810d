#pragma once

#include <stdexcept>
#include <string>

namespace lobx {

// Raised when a numerical routine cannot reach its requested accuracy
// (e.g. quadrature refinement exhausted). Carries diagnostics in what().
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by estimators that need a minimum sample size to be meaningful.
class insufficient_data : public std::runtime_error {
public:
    explicit insufficient_data(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lobx
