#pragma once

#include <stdexcept>
#include <string>

namespace ctaudit {

// Malformed input: unreadable file, bad syntax, unknown dataset name.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a table invariant (negative count,
// inconsistent margin, label mismatch, precondition of an analysis).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the support of a distribution.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

}  // namespace ctaudit
