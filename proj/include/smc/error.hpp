#pragma once

#include <stdexcept>
#include <string>

namespace smc {

// Problems with the data or the model: sample too short, unobserved context,
// invalid tree. The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable files and malformed command lines. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smc
