#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace collatz {

/// Input outside an operation's domain (wrong residue class, s = 1 for sigma, ...).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An iteration bound was reached before the stopping condition fired.
class CapExhausted : public std::runtime_error {
  public:
    CapExhausted(const std::string& what, std::uint64_t cap)
        : std::runtime_error(what), cap_(cap) {}

    std::uint64_t cap() const noexcept { return cap_; }

  private:
    std::uint64_t cap_;
};

/// An enumeration would exceed its configured size guard.
class GuardExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (z-value files, fixtures, command-line numbers).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Thrown by the checked 64-bit paths; callers retry with arbitrary precision.
struct Overflow {};

} // namespace detail

} // namespace collatz
