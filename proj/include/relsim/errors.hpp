#pragma once

#include <stdexcept>
#include <string>

namespace relsim {

// Raised when a scenario config fails parsing or validation (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised on numerical failure: singular steady state, non-convergent fit,
// unstable integration request (CLI exit code 3).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relsim
