#pragma once

#include <stdexcept>
#include <string>

namespace liris {

/// Malformed input file or stream (bad length, wrong token count, bad magic).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (dimension mismatch, invalid
/// configuration value).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace liris
