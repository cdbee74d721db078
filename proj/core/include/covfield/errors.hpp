#pragma once

#include <stdexcept>
#include <string>

namespace covfield {

// Bad inputs throw std::invalid_argument. The two types below separate file
// problems from numerical breakdowns so callers can react differently.

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covfield
