#pragma once

#include <stdexcept>
#include <string>

namespace lb {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// raised at light-cone, Bragg and Gamma-function singularities
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

}  // namespace lb
