#pragma once

#include <stdexcept>
#include <string>

namespace lqdisc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-conformable shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (negative delay, non-finite entry, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad integer/size parameter (odd panel count, negative exponent, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A pivot fell below tolerance during a linear solve.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, int pivot) : Error(what), pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

/// Inconsistent or improper plant description.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Invalid cost specification (weight not PSD, negative discount, ...).
class CostError : public Error {
 public:
  using Error::Error;
};

/// Discrete parts do not fit together (column counts, block sizes).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Input file violates the schema. `path()` is the offending field, e.g. `cost.Ts`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace lqdisc
