#pragma once

#include <stdexcept>
#include <string>

namespace flad {

// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row counts or shapes of paired matrices disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// NaN or infinity encountered where finite values are required.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Column 0 of a raw design matrix is not identically one.
class BadIntercept : public Error {
 public:
  using Error::Error;
};

// Invalid penalty or simulation specification.
class BadSpec : public Error {
 public:
  using Error::Error;
};

// An operation requiring p >= 2 was asked for with p < 2.
class DegenerateP : public Error {
 public:
  using Error::Error;
};

// Weighted normal equations stayed singular after the ridge floor.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// A cross-validation training fold is too small to fit the model.
class FoldTooSmall : public Error {
 public:
  using Error::Error;
};

// Malformed text input; carries the 1-based file location.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class NonNumericCell : public ParseError {
 public:
  NonNumericCell(std::size_t row, std::size_t col, const std::string& cell)
      : ParseError(row, col, "non-numeric cell '" + cell + "'") {}
};

class EmptyFile : public Error {
 public:
  using Error::Error;
};

// Inconsistent command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace flad
