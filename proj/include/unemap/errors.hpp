#pragma once

#include <stdexcept>
#include <string>

namespace unemap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file does not provide a mandatory column, or a schema map is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the domain of the variable it is coded for.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A required value is missing from an otherwise well-formed record.
class MissingValueError : public Error {
 public:
  using Error::Error;
};

}  // namespace unemap
