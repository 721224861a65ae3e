#pragma once

#include <stdexcept>
#include <string>

namespace ttj {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV content.
class LoadError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Query, plan or convolution text that does not parse.
class ParseError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

class PlanError : public Error {
 public:
  using Error::Error;
};

class ExecError : public Error {
 public:
  using Error::Error;
};

// A precondition was violated by the caller. Signals a bug, not bad input.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ttj
