#pragma once

#include <objql/qlang/ast.hpp>

#include <string_view>
#include <vector>

namespace objql::qlang {

/// Longest-match tokenizer. Skips whitespace and `#` comments; the result
/// always ends with an Eof token. Throws LexError.
auto tokenize(std::string_view src) -> std::vector<Token>;

/// Recursive-descent parser for whole scripts. Throws ParseError.
///
///     program   := { statement ";" }
///     statement := "register" NAME STRING [ "as" ("jsonl" | "csv") ]
///                | NAME "<-" NAME { "." op }
///
/// Expression precedence, loosest first: `?:`, `||`, `&&`, comparisons,
/// `+ -`, `* / %`, unary `- !`, postfix `.name` and `[i]`.
auto parse_program(const std::vector<Token>& tokens) -> ProgramAst;
auto parse_program(std::string_view src) -> ProgramAst;

/// Parses a standalone expression (the whole input must be consumed).
auto parse_expr(std::string_view src) -> ExprPtr;

}  // namespace objql::qlang
