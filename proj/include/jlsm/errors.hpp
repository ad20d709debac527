#pragma once

#include <stdexcept>
#include <string>

namespace jlsm {

// Parameter outside its mathematical domain (e.g. non-positive shape).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, long line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Precision/covariance matrix not positive definite after jitter.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jlsm
