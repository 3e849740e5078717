#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace momlasso {

/// Precondition on an argument was violated.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested configuration cannot be run on the given data (e.g. more
/// blocks than samples).
class InfeasibleConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The saddle-point iteration produced a non-finite gradient.
class Diverged : public std::runtime_error {
 public:
  Diverged(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

/// Requested diagnostics were not recorded.
class AbsentData : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Too few distinct points for a regression-style summary.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::int64_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

#define MOMLASSO_REQUIRE(cond, msg)             \
  do {                                          \
    if (!(cond)) throw ::momlasso::InvalidInput(msg); \
  } while (0)

}  // namespace momlasso
