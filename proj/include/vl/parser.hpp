#pragma once

#include <optional>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"
#include "vl/lexer.hpp"

namespace vl {

struct ParseResult {
    SourceFile file;
    Diagnostics diagnostics;  // lexer diagnostics are not included
};

ParseResult parse(const SourceManager& sources, const LexResult& lexed, FileId file);

// tokenize + parse; diagnostics from both phases are merged.
ParseResult parse_file(const SourceManager& sources, FileId file);

struct ExprParseResult {
    std::optional<Expr> expr;
    Diagnostics diagnostics;
};

// Parses the whole file as a single expression (E0101 on trailing input).
ExprParseResult parse_expression(const SourceManager& sources, FileId file);

// Binding strength of a binary operator, higher binds tighter; 0 if `op` is
// not a binary operator.
int binary_precedence(std::string_view op);

}  // namespace vl
