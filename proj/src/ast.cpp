#include "vl/ast.hpp"

#include <array>
#include <utility>

namespace vl {

namespace {

constexpr std::array<std::pair<TypeKind, const char*>, 12> kTypeKeywords = {{
    {TypeKind::Clock, "clock"},
    {TypeKind::ClockPosedge, "clock_posedge"},
    {TypeKind::ClockNegedge, "clock_negedge"},
    {TypeKind::Reset, "reset"},
    {TypeKind::ResetAsyncHigh, "reset_async_high"},
    {TypeKind::ResetAsyncLow, "reset_async_low"},
    {TypeKind::ResetSyncHigh, "reset_sync_high"},
    {TypeKind::ResetSyncLow, "reset_sync_low"},
    {TypeKind::Logic, "logic"},
    {TypeKind::Bit, "bit"},
    {TypeKind::U32, "u32"},
    {TypeKind::U64, "u64"},
}};

class Dumper {
public:
    std::string out;

    void expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Path: out += "(path " + join_path(e.path) + ")"; return;
            case ExprKind::SizedLiteral: out += "(sized " + e.text + ")"; return;
            case ExprKind::DecimalLiteral: out += "(dec " + e.text + ")"; return;
            case ExprKind::Unary: out += "(unary " + e.text; break;
            case ExprKind::Binary: out += "(binary " + e.text; break;
            case ExprKind::BitSelect: out += "(select"; break;
            case ExprKind::PartSelect: out += "(part"; break;
            case ExprKind::Call: out += "(call " + join_path(e.path); break;
            case ExprKind::Paren: out += "(paren"; break;
        }
        for (const Expr& sub : e.operands) {
            out += ' ';
            expr(sub);
        }
        out += ')';
    }

    void type(const TypeSpec& t) {
        out += "(type ";
        out += to_keyword(t.kind);
        list("packed", t.packed_dims);
        list("unpacked", t.unpacked_dims);
        out += ')';
    }

    void list(const char* tag, const std::vector<Expr>& exprs) {
        out += " (";
        out += tag;
        for (const Expr& e : exprs) {
            out += ' ';
            expr(e);
        }
        out += ')';
    }

    void doc(const std::optional<DocComment>& d) {
        if (d)
            out += " (doc \"" + d->text + "\")";
    }

    void block(const Block& b) {
        out += "(block";
        for (const Stmt& s : b.stmts) {
            out += ' ';
            stmt(s);
        }
        out += ')';
    }

    void stmt(const Stmt& s) {
        std::visit(Overloaded{
                       [&](const AssignStmt& a) {
                           out += "(assign " + a.op + ' ';
                           expr(a.target);
                           out += ' ';
                           expr(a.value);
                           out += ')';
                       },
                       [&](const IfStmt& i) {
                           out += i.is_reset ? "(if_reset " : "(if ";
                           if (!i.is_reset) {
                               expr(i.condition);
                               out += ' ';
                           }
                           block(i.then_block);
                           for (const ElseClause& e : i.else_clause) {
                               out += " (else ";
                               std::visit(Overloaded{[&](const Block& b) { block(b); },
                                                     [&](const Stmt& nested) { stmt(nested); }},
                                          e.body);
                               out += ')';
                           }
                           out += ')';
                       },
                       [&](const ReturnStmt& r) {
                           out += "(return ";
                           expr(r.value);
                           out += ')';
                       },
                       [&](const Block& b) { block(b); },
                   },
                   s.node);
    }

    void function(const FunctionDecl& f) {
        out += "(function " + f.name;
        for (const FunctionArg& a : f.args) {
            out += " (arg " + a.name + ' ';
            type(a.type);
            out += ')';
        }
        out += ' ';
        type(f.return_type);
        out += ' ';
        block(f.body);
        out += ')';
    }

    void connections(const char* tag, const std::vector<Connection>& conns) {
        out += " (";
        out += tag;
        for (const Connection& c : conns) {
            out += " (" + c.name + ' ';
            expr(c.value);
            out += ')';
        }
        out += ')';
    }

    void module_item(const ModuleItem& item) {
        std::visit(Overloaded{
                       [&](const VarDecl& v) {
                           out += "(var " + v.name + (v.domain ? " `" + *v.domain : std::string()) + ' ';
                           type(v.type);
                           out += ')';
                       },
                       [&](const ConstDecl& c) { const_decl(c); },
                       [&](const InstDecl& i) {
                           out += "(inst " + i.name + ' ' + join_path(i.target) + " (generic";
                           for (const GenericArg& g : i.generic_args)
                               out += ' ' + join_path(g.path);
                           out += ')';
                           if (i.has_param_list)
                               connections("params", i.params);
                           if (i.has_port_list)
                               connections("ports", i.ports);
                           out += ')';
                       },
                       [&](const AssignDecl& a) {
                           out += "(assign_item ";
                           expr(a.target);
                           out += ' ';
                           expr(a.value);
                           out += ')';
                       },
                       [&](const AlwaysFf& a) {
                           out += "(always_ff (";
                           for (std::size_t k = 0; k < a.sensitivity.size(); ++k)
                               out += (k ? " " : "") + a.sensitivity[k].name;
                           out += ") ";
                           block(a.body);
                           out += ')';
                       },
                       [&](const AlwaysComb& a) {
                           out += "(always_comb ";
                           block(a.body);
                           out += ')';
                       },
                       [&](const UnsafeCdc& u) {
                           out += "(unsafe_cdc";
                           for (const ModuleItem& sub : u.items) {
                               out += ' ';
                               module_item(sub);
                           }
                           out += ')';
                       },
                       [&](const FunctionDecl& f) { function(f); },
                   },
                   item.node);
    }

    void const_decl(const ConstDecl& c) {
        out += "(const " + c.name + ' ';
        type(c.type);
        out += ' ';
        expr(c.value);
        out += ')';
    }

    void module(const ModuleDecl& m) {
        out += std::string("(module ") + (m.is_pub ? "pub " : "") + m.name;
        doc(m.doc);
        out += " (generic";
        for (const GenericParam& g : m.generic_params)
            out += ' ' + g.name;
        out += ')';
        if (m.has_param_list) {
            out += " (params";
            for (const ParamDecl& p : m.params) {
                out += " (param " + p.name + ' ';
                type(p.type);
                out += ' ';
                expr(p.value);
                doc(p.doc);
                out += ')';
            }
            out += ')';
        }
        if (m.has_port_list) {
            out += " (ports";
            for (const PortDecl& p : m.ports) {
                out += " (port " + p.name + ' ' + to_string(p.direction) + (p.domain ? " `" + *p.domain : "") + ' ';
                type(p.type);
                doc(p.doc);
                out += ')';
            }
            out += ')';
        }
        for (const ModuleItem& item : m.body) {
            out += ' ';
            module_item(item);
        }
        out += ')';
    }

    void package(const PackageDecl& p) {
        out += std::string("(package ") + (p.is_pub ? "pub " : "") + p.name;
        doc(p.doc);
        for (const PackageItem& item : p.items) {
            out += ' ';
            std::visit(Overloaded{[&](const ConstDecl& c) { const_decl(c); },
                                  [&](const FunctionDecl& f) { function(f); }},
                       item.node);
        }
        out += ')';
    }
};

}  // namespace

std::string join_path(const PathName& path, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i)
            out += sep;
        out += path[i];
    }
    return out;
}

Expr Expr::make_path(PathName path, Span span) {
    Expr e;
    e.kind = ExprKind::Path;
    e.path = std::move(path);
    e.span = span;
    return e;
}

Expr Expr::make_decimal(std::string text, Span span) {
    Expr e;
    e.kind = ExprKind::DecimalLiteral;
    e.text = std::move(text);
    e.span = span;
    return e;
}

Expr Expr::make_binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.text = std::move(op);
    e.span = lhs.span;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

const Expr* lvalue_root(const Expr& expr) {
    const Expr* e = &expr;
    while (e->kind == ExprKind::BitSelect || e->kind == ExprKind::PartSelect)
        e = &e->operands.front();
    return e->kind == ExprKind::Path ? e : nullptr;
}

bool is_lvalue(const Expr& expr) { return lvalue_root(expr) != nullptr; }

const char* to_keyword(TypeKind kind) {
    for (const auto& [k, word] : kTypeKeywords)
        if (k == kind)
            return word;
    return "logic";
}

std::optional<TypeKind> type_kind_from_keyword(std::string_view word) {
    for (const auto& [k, w] : kTypeKeywords)
        if (word == w)
            return k;
    return std::nullopt;
}

bool is_clock_kind(TypeKind kind) {
    return kind == TypeKind::Clock || kind == TypeKind::ClockPosedge || kind == TypeKind::ClockNegedge;
}

bool is_reset_kind(TypeKind kind) {
    return kind == TypeKind::Reset || kind == TypeKind::ResetAsyncHigh || kind == TypeKind::ResetAsyncLow ||
           kind == TypeKind::ResetSyncHigh || kind == TypeKind::ResetSyncLow;
}

const char* to_string(Direction dir) { return dir == Direction::Input ? "input" : "output"; }

std::string dump(const SourceFile& file) {
    Dumper d;
    d.out = "(source";
    for (const Item& item : file.items) {
        d.out += ' ';
        std::visit(Overloaded{[&](const ModuleDecl& m) { d.module(m); },
                              [&](const PackageDecl& p) { d.package(p); }},
                   item);
    }
    d.out += ')';
    return d.out;
}

std::string dump(const Expr& expr) {
    Dumper d;
    d.expr(expr);
    return d.out;
}

}  // namespace vl
