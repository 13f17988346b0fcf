#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narr {

// All recoverable failures in the library surface as narr::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed record in an input file. what() already carries the location.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace narr
