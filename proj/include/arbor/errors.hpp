#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arbor {

/// Base for every error raised by the library. The CLI maps these to exit code 2,
/// except IntegrityError which signals a verification failure (exit code 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (bad depth, level, prime...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A precondition stated in an operation's contract does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or search hit its configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::uint64_t partial_count)
      : Error(what), partial_count_(partial_count) {}

  std::uint64_t partial_count() const noexcept { return partial_count_; }

 private:
  std::uint64_t partial_count_;
};

/// A requested object does not exist in the given setting (e.g. 2^E does not divide q-1).
class UnavailableError : public Error {
 public:
  using Error::Error;
};

/// A computed value contradicts an identity that must hold (an arithmetic bug).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Trial division could not completely factor an integer.
class UnfactoredError : public Error {
 public:
  using Error::Error;
};

/// Input is valid mathematically but outside what is implemented.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace arbor
