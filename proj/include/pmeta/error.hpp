#pragma once

#include <stdexcept>
#include <string>

namespace pmeta {

// Malformed user-supplied text (CSV datasets, experiment spec files).  Keeps
// the 1-based line number so the CLI can point at the offending row; line 0
// marks a whole-file problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(long line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace pmeta
