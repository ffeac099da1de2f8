#pragma once

#include <stdexcept>
#include <string>

namespace vfog {

// Every error raised by the library derives from Error so callers can catch
// the family in one place. The concrete type tells the CLI which exit code
// to use.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NodeDeparted : public Error {
 public:
  using Error::Error;
};

class ClientAbsent : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  using Error::Error;
};

class InsufficientCandidates : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

// Broken engine/policy bookkeeping. Never expected outside of tests.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace vfog
