#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pap/term.hpp"
#include "pap/typecheck.hpp"

namespace pap {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses one term and desugars `let`. `scope` supplies the variables (and
/// their types) that may occur free; an unannotated `let` takes the type of
/// its bound expression, which must therefore typecheck on its own.
///
/// Throws SyntaxError, UnknownPrimitive, and TypeError (only while inferring
/// an unannotated let).
Term parse(std::string_view source, const Context& scope = {});

Type parse_type(std::string_view source);

}  // namespace pap
