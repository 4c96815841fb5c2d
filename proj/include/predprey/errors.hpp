#pragma once

#include <stdexcept>
#include <string>

namespace predprey {

/// Argument outside the domain an operation is defined on (age past the
/// support bound, density outside the admissible range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model or law that violates the hypotheses the machinery relies on
/// (divergent mean, negative rate, unsorted table, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation called on an object that does not support it.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace predprey
