#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace optdom {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed space description (q <= 0, non-positive weights, ...).
class InvalidSpace : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Arithmetic left the representable range; carries the offending index.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// The Köthe dual of the requested space has no closed form here.
class UnsupportedDual : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of the analysis does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Declared metadata contradicted by probed data (negative entry in a
/// matrix declared nonnegative, vanishing column, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class InvalidTailModel : public Error {
 public:
  using Error::Error;
};

/// Input document does not match the expected schema; `path` is a JSON
/// pointer to the failing node.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Two independent computation routes disagreed beyond tolerance.
class OracleDisagreement : public Error {
 public:
  using Error::Error;
};

}  // namespace optdom
