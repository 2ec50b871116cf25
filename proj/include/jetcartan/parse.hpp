#pragma once

#include "jetcartan/expr.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace jetcartan {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& message, int line_, int column_)
        : std::runtime_error(message + " (line " + std::to_string(line_) +
                             ", column " + std::to_string(column_) + ")"),
          line(line_), column(column_) {}
};

// Infix expression grammar: + - * / ^ (right-assoc), calls sin/cos/exp/log/sqrt,
// imaginary unit literal `i`, rational and decimal literals parsed exactly.
Expr parse_expr(std::string_view text);

} // namespace jetcartan
