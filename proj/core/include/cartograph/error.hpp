#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cartograph {

// Malformed or inconsistent input data (files, logs, tables). Callers that
// map errors to exit codes treat this as a data error rather than misuse.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A DataError tied to a 1-based line of a line-oriented input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : DataError("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Training diverged (non-finite loss) or could not start.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cartograph
