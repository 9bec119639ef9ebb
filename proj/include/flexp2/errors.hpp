#pragma once

#include <stdexcept>
#include <string>

namespace flexp2 {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A slice or factor has the wrong number of rows or columns.
struct ShapeMismatch : Error {
  using Error::Error;
};

/// A NaN or infinity was found where finite data is required.
struct NonFinite : Error {
  using Error::Error;
};

/// A tensor with no slices, or a slice with no columns.
struct EmptyTensor : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

/// Khatri-Rao operands disagree on the number of columns.
struct ColumnMismatch : Error {
  using Error::Error;
};

/// The data tensor has zero norm and cannot be normalized.
struct ZeroTensor : Error {
  using Error::Error;
};

/// A factor matrix that must be nonzero has zero norm.
struct DegenerateFactor : Error {
  using Error::Error;
};

/// A solver or grid configuration violates its invariants.
struct InvalidConfig : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Output path exists and --force was not given.
struct RefusedOverwrite : IoError {
  using IoError::IoError;
};

/// Malformed input file; message carries the line number.
struct ParseError : Error {
  ParseError(const std::string& what, long line) : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

}  // namespace flexp2
