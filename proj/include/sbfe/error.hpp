#pragma once

#include <stdexcept>
#include <string>

namespace sbfe {

/// Raised for invalid data, violated preconditions and malformed input files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbfe
