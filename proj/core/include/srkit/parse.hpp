#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "srkit/expr.hpp"

namespace srkit {

/// Raised on malformed equation text. `position()` is the 0-based byte offset of
/// the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Parses infix equation text:
///
///   expr    := term (('+'|'-') term)*
///   term    := unary (('*'|'/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('**' unary)?
///   primary := NUMBER | 'C' | 'x_' DIGITS | FUNC '(' expr ')' | '(' expr ')'
///
/// `**` binds tighter than unary minus and is right-associative. `-NUMBER` becomes a
/// negative Constant; any other negated operand `e` becomes `-1.0*e`.
Expression parse(std::string_view text);

struct PrintOptions {
  /// Render every variable as "VAR" (structural patterns).
  bool mask_variables = false;
};

/// Canonical rendering with minimal parentheses. Children are printed in stored
/// order; `parse(print(e)) == e` for every well-formed `e`.
std::string print(const Expression& e, PrintOptions options = {});

/// Pulls a bare equation out of free-form model output: drops code fences and
/// prose lines, strips "y =" / "f(x) =" prefixes and maps '^' to '**'. Returns the
/// first candidate line that parses, else the best-effort cleaned text.
std::string extract_equation(std::string_view raw);

}  // namespace srkit
