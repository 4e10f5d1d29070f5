#pragma once

#include <stdexcept>
#include <string>

namespace fpc {

/// Coarse error classes. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  InvalidArgument,  // violated precondition (alpha <= 0, bad degree, ...)
  DimensionMismatch,
  Io,               // unreadable / unwritable path
  DataFormat,       // malformed CSV row, bad label, non-finite feature
  EmptyData,        // empty dataset or split
  ModelFormat,      // checksum mismatch, truncated or unsupported model file
  Overflow,
  Numerical,        // non-finite iterate, factorization breakdown
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::InvalidArgument, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorKind::DimensionMismatch, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class DataFormatError : public Error {
 public:
  DataFormatError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::DataFormat, what), line_(line) {}

  /// 1-based line number in the source file, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDataError : public Error {
 public:
  explicit EmptyDataError(const std::string& what)
      : Error(ErrorKind::EmptyData, what) {}
};

class ModelFormatError : public Error {
 public:
  explicit ModelFormatError(const std::string& what)
      : Error(ErrorKind::ModelFormat, what) {}
};

class ChecksumError : public ModelFormatError {
 public:
  explicit ChecksumError(const std::string& what) : ModelFormatError(what) {}
};

class UnsupportedVersionError : public ModelFormatError {
 public:
  explicit UnsupportedVersionError(const std::string& what)
      : ModelFormatError(what) {}
};

class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what)
      : Error(ErrorKind::Overflow, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::Numerical, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what)
      : Error(ErrorKind::Internal, what) {}
};

}  // namespace fpc
