#pragma once

#include <stdexcept>
#include <string>

namespace rectconv {

// Raised when an iterative solve, bracket search or quadrature fails. Input
// validation failures use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rectconv
