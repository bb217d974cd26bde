#pragma once

// Error taxonomy shared across the library. Every failure a caller can
// meaningfully react to gets its own type; the CLI maps them to exit codes.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlgcs {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed formula text. Carries the byte offset of the failure and the
// set of tokens that would have been accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& msg)
      : Error(msg), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Raised when a deterministic Buchi automaton cannot be produced for a
// formula (or the produced automaton fails self-validation).
class UnsupportedFormula : public Error {
 public:
  using Error::Error;
};

// A finite-word operation was given a formula outside the co-safe fragment.
class CosafeRequired : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// The start configuration lies in no labeled region.
class NoInitialRegion : public Error {
 public:
  using Error::Error;
};

// The product graph admits no discrete source-to-target path at all.
class UnsatisfiableInProduct : public Error {
 public:
  using Error::Error;
};

// Rounding exhausted its budget without an integer-feasible path.
class NoPathFound : public Error {
 public:
  using Error::Error;
};

// Every accepting vertex was burned without closing a loop.
class NoLoopFound : public Error {
 public:
  using Error::Error;
};

// Conic backend failure, with backend diagnostics attached.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Scenario file problems (schema, dimensions, unknown atoms).
class ScenarioError : public Error {
 public:
  explicit ScenarioError(const std::string& msg, std::size_t offset = kNoOffset)
      : Error(msg), offset_(offset) {}
  bool has_offset() const { return offset_ != kNoOffset; }
  std::size_t offset() const { return offset_; }
  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

 private:
  std::size_t offset_;
};

}  // namespace tlgcs
