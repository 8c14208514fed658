#pragma once

#include <functional>
#include <string>

#include "vl/ast.hpp"

namespace vl {

// Renders a path. The default joins segments with `::`.
using PathPrinter = std::function<std::string(const PathName&)>;

// Expression text with single spaces around binary operators. Parentheses
// appear only where the tree has Paren nodes.
std::string format_expr(const Expr& expr, const PathPrinter& paths = {});

// Source-level type text, e.g. `logic<WIDTH, 2>[4]`.
std::string format_type(const TypeSpec& type);

// Canonical source text: 4-space indentation, one list element per line with
// trailing commas, comments re-emitted where they were attached.
std::string format(const SourceFile& file);

}  // namespace vl
