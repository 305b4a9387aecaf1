#pragma once

#include <stdexcept>
#include <string>

namespace occtime {

/// A precondition on the arguments was violated (alpha out of range,
/// nonpositive time, moment of a diverging order, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to produce a finite, converged value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message)
{
  if (!condition) throw DomainError(message);
}

}  // namespace occtime
