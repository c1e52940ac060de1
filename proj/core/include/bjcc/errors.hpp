#pragma once

#include <stdexcept>
#include <string>

namespace bjcc {

// Argument outside the mathematical domain of a function or law.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Offered load at or beyond the number of servers (r >= c).
class InstabilityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// No server count within the search cap satisfies the chance constraint.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, dataset file or command-line input.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace bjcc
