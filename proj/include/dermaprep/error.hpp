#pragma once

#include <stdexcept>
#include <string>

namespace dermaprep {

// Error categories map onto the CLI exit-code contract:
// 1 domain finding, 2 I/O, 3 config/parse.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : ConfigError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Violated precondition on an operation argument (bad shape, bad channel
// count, empty input).
class InvalidArgument : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace dermaprep
