#pragma once

#include <stdexcept>
#include <string>

namespace flowcomp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error in an expression/predicate source, 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class EvalErrorKind { domain_error, division_by_zero, dimension_mismatch };

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  EvalErrorKind kind() const noexcept { return kind_; }

 private:
  EvalErrorKind kind_;
};

class OutsideDomain : public Error {
 public:
  using Error::Error;
};

class NotInChart : public Error {
 public:
  using Error::Error;
};

class NotInOverlap : public Error {
 public:
  using Error::Error;
};

class TargetNotComplete : public Error {
 public:
  using Error::Error;
};

/// A numerical query could not be decided (integration was inconclusive).
class Undecided : public Error {
 public:
  using Error::Error;
};

/// Scenario file violates the schema; path names the offending field ("field.rhs").
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace flowcomp
