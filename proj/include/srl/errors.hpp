#pragma once

#include <stdexcept>
#include <string>

namespace srl {

// Raised when a numeric kernel (root finder, quadrature) cannot deliver the
// requested accuracy. Precondition violations use std::invalid_argument.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace srl
