#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact division left a nonzero remainder. `witness()` holds the
/// remainder (canonical text) at the step where division stopped.
class NotDivisible : public Error {
 public:
  NotDivisible(const std::string& what, std::string witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by the zero polynomial") {}
};

class ZeroPolynomial : public Error {
 public:
  explicit ZeroPolynomial(const std::string& op)
      : Error(op + ": undefined on the zero polynomial") {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Invalid knot or operator parameters.
class BadParams : public Error {
 public:
  using Error::Error;
};

/// A recurrence was requested for the wrong family of torus knots.
class WrongCase : public Error {
 public:
  using Error::Error;
};

/// A kernel query exceeds the configured unknown-count cap.
class SystemTooLarge : public Error {
 public:
  SystemTooLarge(const std::string& what, std::size_t unknowns, std::size_t cap)
      : Error(what), unknowns_(unknowns), cap_(cap) {}
  std::size_t unknowns() const noexcept { return unknowns_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t unknowns_;
  std::size_t cap_;
};

/// The kernel search could not complete (e.g. reconstruction failed to
/// stabilize within its point budget).
class KernelError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtk
