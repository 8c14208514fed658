#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vl/lexer.hpp"
#include "vl/source.hpp"

namespace vl {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Path segments such as {"sample", "Sample"} for `sample::Sample`.
using PathName = std::vector<std::string>;

std::string join_path(const PathName& path, std::string_view sep = "::");

// Comments that the formatter re-emits around a node.
struct AttachedComments {
    std::vector<Comment> leading;
    std::vector<Comment> trailing;
    bool blank_line_before = false;
};

enum class ExprKind {
    Path,
    SizedLiteral,
    DecimalLiteral,
    Unary,
    Binary,
    BitSelect,   // operands: base, index
    PartSelect,  // operands: base, msb, lsb
    Call,        // path + operands as arguments
    Paren,
};

struct Expr {
    ExprKind kind = ExprKind::Path;
    Span span;
    PathName path;
    std::string text;  // literal lexeme or operator spelling
    std::vector<Expr> operands;

    static Expr make_path(PathName path, Span span);
    static Expr make_decimal(std::string text, Span span);
    static Expr make_binary(std::string op, Expr lhs, Expr rhs);
};

// `a`, `a[i]`, `a[7:0]`: the variable an lvalue-shaped expression writes.
const Expr* lvalue_root(const Expr& expr);
bool is_lvalue(const Expr& expr);

enum class TypeKind {
    Clock,
    ClockPosedge,
    ClockNegedge,
    Reset,
    ResetAsyncHigh,
    ResetAsyncLow,
    ResetSyncHigh,
    ResetSyncLow,
    Logic,
    Bit,
    U32,
    U64,
};

const char* to_keyword(TypeKind kind);
std::optional<TypeKind> type_kind_from_keyword(std::string_view word);
bool is_clock_kind(TypeKind kind);
bool is_reset_kind(TypeKind kind);

struct TypeSpec {
    TypeKind kind = TypeKind::Logic;
    std::vector<Expr> packed_dims;
    std::vector<Expr> unpacked_dims;
    Span span;
};

struct ParamDecl {
    std::string name;
    Span name_span;
    TypeSpec type;
    Expr value;
    std::optional<DocComment> doc;
    AttachedComments comments;
};

enum class Direction { Input, Output };

const char* to_string(Direction dir);

struct PortDecl {
    std::string name;
    Span name_span;
    Direction direction = Direction::Input;
    std::optional<std::string> domain;
    std::optional<Span> domain_span;
    TypeSpec type;
    std::optional<DocComment> doc;
    AttachedComments comments;
};

// ---------------------------------------------------------------------------
// Statements

struct Stmt;

struct Block {
    std::vector<Stmt> stmts;
    std::vector<Comment> dangling;  // comments just before the closing brace
    Span open;
};

struct AssignStmt {
    Expr target;
    std::string op;  // =, +=, -=, *=, &=, |=, ^=, <<=, >>=
    Expr value;
};

struct ElseClause;

struct IfStmt {
    Span keyword;
    bool is_reset = false;  // if_reset has no condition
    Expr condition;
    Block then_block;
    // Either empty, a single nested If (else-if chain), or a block.
    std::vector<ElseClause> else_clause;
};

struct ReturnStmt {
    Expr value;
};

struct Stmt {
    std::variant<AssignStmt, IfStmt, ReturnStmt, Block> node;
    Span span;
    AttachedComments comments;
};

struct ElseClause {
    std::variant<Block, Stmt> body;  // Stmt always holds an IfStmt
};

// ---------------------------------------------------------------------------
// Module and package items

struct VarDecl {
    std::string name;
    Span name_span;
    std::optional<std::string> domain;
    std::optional<Span> domain_span;
    TypeSpec type;
};

struct ConstDecl {
    std::string name;
    Span name_span;
    TypeSpec type;
    Expr value;
};

struct Connection {
    std::string name;
    Span name_span;
    Expr value;
    AttachedComments comments;
};

struct GenericArg {
    PathName path;
    Span span;
};

struct InstDecl {
    std::string name;
    Span name_span;
    PathName target;
    Span target_span;
    std::vector<GenericArg> generic_args;
    bool has_param_list = false;
    std::vector<Connection> params;
    bool has_port_list = false;
    std::vector<Connection> ports;
};

struct AssignDecl {
    Expr target;
    Expr value;
};

struct SensitivityName {
    std::string name;
    Span span;
};

struct AlwaysFf {
    std::vector<SensitivityName> sensitivity;  // empty: abbreviated form
    Block body;
};

struct AlwaysComb {
    Block body;
};

struct FunctionArg {
    std::string name;
    Span name_span;
    TypeSpec type;
};

struct FunctionDecl {
    std::string name;
    Span name_span;
    std::vector<FunctionArg> args;
    TypeSpec return_type;
    Block body;
};

struct ModuleItem;

struct UnsafeCdc {
    std::vector<ModuleItem> items;
    std::vector<Comment> dangling;
};

struct ModuleItem {
    std::variant<VarDecl, ConstDecl, InstDecl, AssignDecl, AlwaysFf, AlwaysComb, UnsafeCdc, FunctionDecl> node;
    Span span;  // leading keyword
    AttachedComments comments;
};

struct GenericParam {
    std::string name;
    Span span;
};

struct ModuleDecl {
    std::string name;
    Span name_span;
    Span span;  // `pub` or `module` keyword
    bool is_pub = false;
    std::vector<GenericParam> generic_params;
    bool has_param_list = false;
    std::vector<ParamDecl> params;
    bool has_port_list = false;
    std::vector<PortDecl> ports;
    std::vector<ModuleItem> body;
    std::vector<Comment> dangling;
    std::optional<DocComment> doc;
    AttachedComments comments;

    bool is_generic() const { return !generic_params.empty(); }
};

struct PackageItem {
    std::variant<ConstDecl, FunctionDecl> node;
    Span span;
    AttachedComments comments;
};

struct PackageDecl {
    std::string name;
    Span name_span;
    Span span;
    bool is_pub = false;
    std::vector<PackageItem> items;
    std::vector<Comment> dangling;
    std::optional<DocComment> doc;
    AttachedComments comments;
};

using Item = std::variant<ModuleDecl, PackageDecl>;

struct SourceFile {
    FileId file;
    std::vector<Item> items;
    std::vector<Comment> dangling;
};

// Canonical S-expression of the syntax tree. Spans, comment placement and
// blank lines are excluded; doc comment texts are included. Two trees are
// structurally equal iff their dumps are equal.
std::string dump(const SourceFile& file);
std::string dump(const Expr& expr);

// Visits every expression node (pre-order), including nested operands.
template <class F>
void for_each_expr(const Expr& expr, F&& f) {
    f(expr);
    for (const Expr& sub : expr.operands)
        for_each_expr(sub, f);
}

}  // namespace vl
