#pragma once

// Text form of queries.
//
// Grammar (keywords case-insensitive, names case-sensitive):
//   query      := SELECT field ("," field)* FROM name ("," name)* WHERE tree
//   field      := name "." name
//   tree       := operand (logop operand)*     (one logop kind per level)
//   operand    := comparison | "(" tree ")"
//   comparison := field op field
//   logop      := AND | OR
//   op         := EQ | GT | LT
//
// And binds no tighter than Or: mixing the two at one parenthesis level is a
// syntax error, so nesting is always explicit. Chains of one logop fold left.

#include <stdexcept>
#include <string>

#include "querylink/types.hpp"

namespace querylink {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, size_t position);
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Parses the textual form. Throws ParseError with a character offset on
// syntax errors and on scope errors (select or comparison field naming a
// type outside the From list).
Query parse_query(const std::string& text);

// Canonical rendering: comparisons directly under the root are wrapped in
// parentheses, nested groups add one pair per level, and leaves inside a
// group are bare. parse_query(render_query(q)) reproduces q exactly.
std::string render_query(const Query& q);

std::string render_comparison(const Comparison& c);

}  // namespace querylink
