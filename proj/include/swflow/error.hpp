#pragma once

#include <stdexcept>
#include <string>

namespace swflow {

/// Base class for every error raised by the library. `kind()` is a short
/// stable tag used by the command-line tool to build exit codes and
/// single-line error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid parameters (dimension out of range, bad key, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("configuration", what) {}
};

/// Operation not defined for the given input (e.g. chirality in odd m).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error("unsupported", what) {}
};

/// Fields living on different lattices or with different fiber sizes.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

/// Corrupt, truncated or inconsistent snapshot file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

/// Diagnostic input does not satisfy its precondition (e.g. slab coverage).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

}  // namespace swflow
