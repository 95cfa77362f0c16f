#pragma once

#include <stdexcept>
#include <string>

namespace mwq {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes.

/// Shapes of operands do not fit together (non-square, size mismatch).
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A site, level or sector index outside its range.
class IndexError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Arguments that are well-shaped but mathematically invalid (d < 2, n = 1, alpha == beta, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A requested formula is not defined for the given local dimension.
class UnsupportedFormError : public DomainError {
public:
  using DomainError::DomainError;
};

/// A configured resource cap (Hilbert-space dimension) would be exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// An identity that holds exactly in exact arithmetic was violated beyond roundoff.
class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace mwq
