#pragma once

#include "fracexp/expr.hpp"
#include "fracexp/functional.hpp"

#include <optional>
#include <string_view>

namespace fracexp {

/// Resolves the time symbols t1..tJ and T and bounds literal times to [0, T].
struct ParseContext {
    std::optional<TimeGrid> grid;
    std::optional<double> horizon;  // used when no grid is given

    std::optional<double> T() const {
        if (grid) return grid->T();
        return horizon;
    }
};

/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' unary) | ('/' unary))*      divisor must be constant
///   unary   := '-' unary | factor
///   factor  := primary ('^' integer)?
///   primary := number | 'B' '(' time ')' | 'IB' '(' time ',' time ')'
///            | 'IB2' '(' time ',' time ')' | 'WI' '(' poly ';' time ',' time ')'
///            | 'exp' '(' expr ')' | '(' expr ')'
///   time    := number | 'T' | 't' digits
///   poly    := polynomial in 's' built from numbers, s, + - * ^ and parentheses
/// Errors carry a 1-based byte offset.
Expr parse(std::string_view src, const ParseContext& ctx = {});

}  // namespace fracexp
