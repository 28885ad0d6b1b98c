#pragma once

#include <stdexcept>
#include <string>

namespace ctgn {

/// Base for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutation attempted on a frozen model.
class ModelFrozenError : public Error {
 public:
  ModelFrozenError() : Error("model is frozen") {}
};

/// An id or name that does not resolve in the model.
class UnknownIdError : public Error {
 public:
  using Error::Error;
};

/// Caller passed an argument outside its documented range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Model file errors. Each failure mode has its own type so callers can
// tell a foreign file from a damaged one.

class ModelFileError : public Error {
 public:
  using Error::Error;
};

class FormatError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

class VersionError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

class TruncatedError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

class ChecksumError : public ModelFileError {
 public:
  using ModelFileError::ModelFileError;
};

/// Corpus or sidecar parse failure; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctgn
