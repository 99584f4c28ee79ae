#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kmk {

// Invalid input data or an inapplicable operation (exit code 1 territory).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A bug: derived structures are inconsistent.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
};

} // namespace kmk
