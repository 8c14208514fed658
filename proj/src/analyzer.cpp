#include "vl/analyzer.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <memory>
#include <set>

namespace vl {

namespace {

std::string q(const std::string& name) { return "'" + name + "'"; }

Diagnostic error_at(const char* code, std::string message, Span span, std::vector<Span> related = {}) {
    return Diagnostic::make(code, std::move(message), span, std::move(related));
}

// ---------------------------------------------------------------------------
// Expression walkers shared by the checks

void walk_stmt_exprs(const Stmt& s, const std::function<void(const Expr&)>& f);

void walk_block_exprs(const Block& b, const std::function<void(const Expr&)>& f) {
    for (const Stmt& s : b.stmts)
        walk_stmt_exprs(s, f);
}

void walk_else(const std::vector<ElseClause>& clauses, const std::function<void(const Block&)>& on_block,
               const std::function<void(const Stmt&)>& on_stmt) {
    for (const ElseClause& e : clauses) {
        std::visit(Overloaded{[&](const Block& b) { on_block(b); }, [&](const Stmt& s) { on_stmt(s); }}, e.body);
    }
}

void walk_stmt_exprs(const Stmt& s, const std::function<void(const Expr&)>& f) {
    std::visit(Overloaded{
                   [&](const AssignStmt& a) {
                       f(a.target);
                       f(a.value);
                   },
                   [&](const IfStmt& i) {
                       if (!i.is_reset)
                           f(i.condition);
                       walk_block_exprs(i.then_block, f);
                       walk_else(
                           i.else_clause, [&](const Block& b) { walk_block_exprs(b, f); },
                           [&](const Stmt& n) { walk_stmt_exprs(n, f); });
                   },
                   [&](const ReturnStmt& r) { f(r.value); },
                   [&](const Block& b) { walk_block_exprs(b, f); },
               },
               s.node);
}

void walk_type_exprs(const TypeSpec& t, const std::function<void(const Expr&)>& f) {
    for (const Expr& d : t.packed_dims)
        f(d);
    for (const Expr& d : t.unpacked_dims)
        f(d);
}

void walk_function_exprs(const FunctionDecl& fn, const std::function<void(const Expr&)>& f) {
    for (const FunctionArg& a : fn.args)
        walk_type_exprs(a.type, f);
    walk_type_exprs(fn.return_type, f);
    walk_block_exprs(fn.body, f);
}

using ScopedExprFn = std::function<void(const Expr&, ScopeId)>;

void walk_items_exprs(const std::vector<ModuleItem>& items, const SymbolTable& table, ScopeId scope,
                      const ScopedExprFn& f) {
    auto here = [&](const Expr& e) { f(e, scope); };
    for (const ModuleItem& item : items) {
        std::visit(Overloaded{
                       [&](const VarDecl& v) { walk_type_exprs(v.type, here); },
                       [&](const ConstDecl& c) {
                           walk_type_exprs(c.type, here);
                           here(c.value);
                       },
                       [&](const InstDecl& i) {
                           for (const Connection& c : i.params)
                               here(c.value);
                           for (const Connection& c : i.ports)
                               here(c.value);
                       },
                       [&](const AssignDecl& a) {
                           here(a.target);
                           here(a.value);
                       },
                       [&](const AlwaysFf& a) { walk_block_exprs(a.body, here); },
                       [&](const AlwaysComb& a) { walk_block_exprs(a.body, here); },
                       [&](const UnsafeCdc& u) { walk_items_exprs(u.items, table, scope, f); },
                       [&](const FunctionDecl& fn) {
                           ScopeId inner = table.scope_of(fn).value_or(scope);
                           walk_function_exprs(fn, [&](const Expr& e) { f(e, inner); });
                       },
                   },
                   item.node);
    }
}

// Root expressions of a module, each with the scope it is evaluated in.
void walk_module_exprs(const ConcreteModule& m, const ScopedExprFn& f) {
    for (const ParamDecl& p : m.decl.params) {
        walk_type_exprs(p.type, [&](const Expr& e) { f(e, m.scope); });
        f(p.value, m.scope);
    }
    for (const PortDecl& p : m.decl.ports)
        walk_type_exprs(p.type, [&](const Expr& e) { f(e, m.scope); });
    walk_items_exprs(m.decl.body, *m.table, m.scope, f);
}

template <class F>
void for_each_item(const std::vector<ModuleItem>& items, F&& f, bool in_unsafe = false) {
    for (const ModuleItem& item : items) {
        if (const auto* u = std::get_if<UnsafeCdc>(&item.node))
            for_each_item(u->items, f, true);
        else
            f(item, in_unsafe);
    }
}

// ---------------------------------------------------------------------------
// Signals of a module

struct SignalInfo {
    std::string name;
    Span span;
    bool is_port = false;
    Direction direction = Direction::Input;
    const TypeSpec* type = nullptr;
    std::optional<std::string> domain;
};

struct Signals {
    std::vector<SignalInfo> list;
    std::map<std::string, std::size_t> index;

    const SignalInfo* find(const std::string& name) const {
        auto it = index.find(name);
        return it == index.end() ? nullptr : &list[it->second];
    }
};

Signals collect_signals(const ModuleDecl& decl) {
    Signals s;
    auto add = [&](SignalInfo info) {
        if (s.index.count(info.name))
            return;  // duplicate, reported by the resolver
        s.index.emplace(info.name, s.list.size());
        s.list.push_back(std::move(info));
    };
    for (const PortDecl& p : decl.ports)
        add(SignalInfo{p.name, p.name_span, true, p.direction, &p.type, p.domain});
    for_each_item(decl.body, [&](const ModuleItem& item, bool) {
        if (const auto* v = std::get_if<VarDecl>(&item.node))
            add(SignalInfo{v->name, v->name_span, false, Direction::Input, &v->type, v->domain});
    });
    return s;
}

// Name of the module signal `path` refers to from `scope`, if any.
std::optional<std::string> signal_name(const ConcreteModule& m, const Expr& path, ScopeId scope) {
    if (path.kind != ExprKind::Path)
        return std::nullopt;
    Resolution r = resolve(*m.table, path.path, scope, UseKind::Any, path.span);
    if (!r.path || r.path->table != m.table)
        return std::nullopt;
    const Symbol& sym = r.path->symbol();
    if ((sym.kind != SymbolKind::Var && sym.kind != SymbolKind::Port) || sym.scope != m.scope)
        return std::nullopt;
    return sym.name;
}

const ConcreteModule* child_of(const ConcreteModule& m, const Design& design, const InstDecl& inst) {
    auto it = m.children.find(inst.name);
    if (it == m.children.end())
        return nullptr;
    for (const ConcreteModule& c : design.modules)
        if (!c.is_template && c.name == it->second)
            return &c;
    return nullptr;
}

const PortDecl* find_port(const ModuleDecl& decl, const std::string& name) {
    for (const PortDecl& p : decl.ports)
        if (p.name == name)
            return &p;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Processes: the driving and reading sites of a module

struct Access {
    std::string name;
    Span span;
    bool connection = false;  // whole-signal port connection
};

struct Assignment {
    Access target;
    std::vector<Access> sources;
};

enum class ProcKind { Ff, Comb, Assign, Inst, Function };

struct Process {
    ProcKind kind = ProcKind::Comb;
    Span span;
    bool unsafe_cdc = false;
    const ModuleItem* item = nullptr;
    std::vector<Assignment> assigns;
    std::vector<Access> reads;
    std::vector<Access> unknown;        // connected to a child whose ports are not known
    std::vector<Span> non_lvalue_outputs;  // child outputs connected to expressions
};

class ProcessCollector {
public:
    ProcessCollector(const ConcreteModule& m, const Design& design) : m_(m), design_(design) {}

    std::vector<Process> run() {
        for_each_item(m_.decl.body, [&](const ModuleItem& item, bool unsafe_cdc) { visit(item, unsafe_cdc); });
        return std::move(procs_);
    }

private:
    void reads_of(const Expr& e, ScopeId scope, std::vector<Access>& out) {
        for_each_expr(e, [&](const Expr& sub) {
            if (auto name = signal_name(m_, sub, scope))
                out.push_back(Access{*name, sub.span});
        });
    }

    // Reads inside an lvalue: index and bound expressions only.
    void lvalue_reads(const Expr& e, ScopeId scope, std::vector<Access>& out) {
        switch (e.kind) {
            case ExprKind::BitSelect:
                lvalue_reads(e.operands[0], scope, out);
                reads_of(e.operands[1], scope, out);
                break;
            case ExprKind::PartSelect:
                lvalue_reads(e.operands[0], scope, out);
                reads_of(e.operands[1], scope, out);
                reads_of(e.operands[2], scope, out);
                break;
            case ExprKind::Paren: lvalue_reads(e.operands[0], scope, out); break;
            default: break;
        }
    }

    void assignment(Process& p, const Expr& target, const Expr& value, bool compound,
                    const std::vector<Access>& conditions) {
        Assignment a;
        a.sources = conditions;
        reads_of(value, m_.scope, a.sources);
        lvalue_reads(target, m_.scope, a.sources);
        const Expr* root = lvalue_root(target);
        std::optional<std::string> name = root ? signal_name(m_, *root, m_.scope) : std::nullopt;
        if (compound && name)
            a.sources.push_back(Access{*name, root->span});
        for (const Access& s : a.sources)
            p.reads.push_back(s);
        if (name) {
            a.target = Access{*name, target.span};
            p.assigns.push_back(std::move(a));
        }
    }

    void block(Process& p, const Block& b, std::vector<Access>& conditions) {
        for (const Stmt& s : b.stmts)
            stmt(p, s, conditions);
    }

    void stmt(Process& p, const Stmt& s, std::vector<Access>& conditions) {
        std::visit(Overloaded{
                       [&](const AssignStmt& a) { assignment(p, a.target, a.value, a.op != "=", conditions); },
                       [&](const IfStmt& i) {
                           std::size_t mark = conditions.size();
                           if (!i.is_reset) {
                               std::vector<Access> cond;
                               reads_of(i.condition, m_.scope, cond);
                               for (const Access& c : cond) {
                                   p.reads.push_back(c);
                                   conditions.push_back(c);
                               }
                           }
                           block(p, i.then_block, conditions);
                           walk_else(
                               i.else_clause, [&](const Block& b) { block(p, b, conditions); },
                               [&](const Stmt& n) { stmt(p, n, conditions); });
                           conditions.resize(mark);
                       },
                       [&](const ReturnStmt& r) { reads_of(r.value, m_.scope, p.reads); },
                       [&](const Block& b) { block(p, b, conditions); },
                   },
                   s.node);
    }

    void visit(const ModuleItem& item, bool unsafe_cdc) {
        Process p;
        p.span = item.span;
        p.unsafe_cdc = unsafe_cdc;
        p.item = &item;
        std::vector<Access> conditions;
        bool keep = true;
        std::visit(Overloaded{
                       [&](const AssignDecl& a) {
                           p.kind = ProcKind::Assign;
                           assignment(p, a.target, a.value, false, conditions);
                       },
                       [&](const AlwaysFf& a) {
                           p.kind = ProcKind::Ff;
                           block(p, a.body, conditions);
                       },
                       [&](const AlwaysComb& a) {
                           p.kind = ProcKind::Comb;
                           block(p, a.body, conditions);
                       },
                       [&](const InstDecl& i) {
                           p.kind = ProcKind::Inst;
                           inst(p, i);
                       },
                       [&](const FunctionDecl& f) {
                           p.kind = ProcKind::Function;
                           ScopeId scope = m_.table->scope_of(f).value_or(m_.scope);
                           walk_function_exprs(f, [&](const Expr& e) {
                               for_each_expr(e, [&](const Expr& sub) {
                                   if (auto name = signal_name(m_, sub, scope))
                                       p.reads.push_back(Access{*name, sub.span});
                               });
                           });
                       },
                       [&](const auto&) { keep = false; },
                   },
                   item.node);
        if (keep)
            procs_.push_back(std::move(p));
    }

    void inst(Process& p, const InstDecl& i) {
        const ConcreteModule* child = child_of(m_, design_, i);
        for (const Connection& c : i.ports) {
            const PortDecl* port = child ? find_port(child->decl, c.name) : nullptr;
            bool whole = c.value.kind == ExprKind::Path;
            if (!child) {
                std::vector<Access> found;
                reads_of(c.value, m_.scope, found);
                for (Access& a : found) {
                    a.connection = whole;
                    p.unknown.push_back(a);
                    p.reads.push_back(a);
                }
                continue;
            }
            if (port && port->direction == Direction::Output) {
                if (!is_lvalue(c.value)) {
                    p.non_lvalue_outputs.push_back(c.value.span);
                    reads_of(c.value, m_.scope, p.reads);
                    continue;
                }
                Assignment a;
                lvalue_reads(c.value, m_.scope, a.sources);
                p.reads.insert(p.reads.end(), a.sources.begin(), a.sources.end());
                if (auto name = signal_name(m_, *lvalue_root(c.value), m_.scope)) {
                    a.target = Access{*name, c.value.span, whole};
                    p.assigns.push_back(std::move(a));
                }
                continue;
            }
            std::vector<Access> found;
            reads_of(c.value, m_.scope, found);
            for (Access& a : found) {
                a.connection = whole;
                p.reads.push_back(a);
            }
        }
    }

    const ConcreteModule& m_;
    const Design& design_;
    std::vector<Process> procs_;
};

// ---------------------------------------------------------------------------
// Constant evaluation helpers

using SymbolKey = std::pair<const SymbolTable*, SymbolId>;

std::optional<std::uint64_t> lookup_impl(const SymbolTable& table, ScopeId scope, const Expr& path, Diagnostics& diags,
                                         std::shared_ptr<std::set<SymbolKey>> visiting) {
    Resolution r = resolve(table, path.path, scope, UseKind::Any, path.span);
    if (!r.path)
        return std::nullopt;  // undefined names are reported by the resolver
    const Symbol& sym = r.path->symbol();
    const Expr* value = nullptr;
    if (const auto* p = sym.as<ParamDecl>())
        value = &p->value;
    else if (const auto* c = sym.as<ConstDecl>())
        value = &c->value;
    if (!value) {
        diags.push_back(error_at("E0301", q(join_path(path.path)) + " is a " + to_string(sym.kind) +
                                              ", not a constant",
                                 path.span));
        return std::nullopt;
    }
    SymbolKey key{r.path->table, r.path->target};
    if (visiting->count(key)) {
        diags.push_back(error_at("E0301", "constant " + q(sym.name) + " depends on itself", path.span,
                                 {sym.decl_span}));
        return std::nullopt;
    }
    visiting->insert(key);
    const SymbolTable& owner = *r.path->table;
    ScopeId owner_scope = sym.scope;
    ConstLookup nested = [&owner, owner_scope, visiting](const Expr& p, Diagnostics& d) {
        return lookup_impl(owner, owner_scope, p, d, visiting);
    };
    auto result = eval_const(*value, nested, diags);
    visiting->erase(key);
    if (!result)
        return std::nullopt;
    return result->value;
}

std::vector<std::uint32_t> literal_limbs(const SizedLiteral& lit) {
    std::vector<std::uint32_t> limbs;
    for (char c : lit.digits) {
        std::uint32_t d = 0;
        if (c >= '0' && c <= '9')
            d = static_cast<std::uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f')
            d = static_cast<std::uint32_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            d = static_cast<std::uint32_t>(c - 'A' + 10);
        std::uint64_t carry = d;
        for (std::uint32_t& limb : limbs) {
            std::uint64_t v = static_cast<std::uint64_t>(limb) * static_cast<std::uint64_t>(lit.base) + carry;
            limb = static_cast<std::uint32_t>(v);
            carry = v >> 32;
        }
        if (carry)
            limbs.push_back(static_cast<std::uint32_t>(carry));
    }
    return limbs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constant evaluation

std::optional<ConstValue> eval_const(const Expr& e, const ConstLookup& lookup, Diagnostics& diags) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    auto fail = [&](std::string message) -> std::optional<ConstValue> {
        diags.push_back(error_at("E0301", std::move(message), e.span));
        return std::nullopt;
    };
    auto ok = [&](std::uint64_t v) { return std::optional<ConstValue>(ConstValue{v, e.span}); };

    switch (e.kind) {
        case ExprKind::DecimalLiteral: {
            std::uint64_t v = 0;
            for (char c : e.text) {
                if (c == '_')
                    continue;
                auto d = static_cast<std::uint64_t>(c - '0');
                if (v > (kMax - d) / 10)
                    return fail("constant " + e.text + " does not fit in 64 bits");
                v = v * 10 + d;
            }
            return ok(v);
        }
        case ExprKind::SizedLiteral: {
            auto lit = parse_sized_literal(e.text);
            if (!lit)
                return std::nullopt;  // lexer already reported it
            auto v = literal_value(*lit);
            if (!v)
                return fail("constant " + e.text + " does not fit in 64 bits");
            return ok(*v);
        }
        case ExprKind::Path: {
            if (!lookup)
                return fail(q(join_path(e.path)) + " is not a constant");
            auto v = lookup(e, diags);
            if (!v)
                return std::nullopt;
            return ok(*v);
        }
        case ExprKind::Paren: {
            auto v = eval_const(e.operands[0], lookup, diags);
            return v ? ok(v->value) : std::nullopt;
        }
        case ExprKind::Unary: {
            auto v = eval_const(e.operands[0], lookup, diags);
            if (!v)
                return std::nullopt;
            if (e.text == "!")
                return ok(v->value == 0);
            if (e.text == "~")
                return ok(~v->value);
            if (v->value != 0)
                return fail("negation of a nonzero unsigned constant wraps");
            return ok(0);
        }
        case ExprKind::Binary: {
            auto a = eval_const(e.operands[0], lookup, diags);
            auto b = eval_const(e.operands[1], lookup, diags);
            if (!a || !b)
                return std::nullopt;
            std::uint64_t x = a->value;
            std::uint64_t y = b->value;
            const std::string& op = e.text;
            if (op == "+") {
                if (x > kMax - y)
                    return fail("constant addition overflows 64 bits");
                return ok(x + y);
            }
            if (op == "-") {
                if (x < y)
                    return fail("constant subtraction wraps below zero");
                return ok(x - y);
            }
            if (op == "*") {
                if (x != 0 && y > kMax / x)
                    return fail("constant multiplication overflows 64 bits");
                return ok(x * y);
            }
            if (op == "/" || op == "%") {
                if (y == 0)
                    return fail("division by zero in constant expression");
                return ok(op == "/" ? x / y : x % y);
            }
            if (op == "<<") {
                if (y >= 64 || (x != 0 && static_cast<std::uint64_t>(std::countl_zero(x)) < y))
                    return fail("constant shift overflows 64 bits");
                return ok(x << y);
            }
            if (op == ">>")
                return ok(y >= 64 ? 0 : x >> y);
            if (op == "&")
                return ok(x & y);
            if (op == "|")
                return ok(x | y);
            if (op == "^")
                return ok(x ^ y);
            if (op == "==")
                return ok(x == y);
            if (op == "!=")
                return ok(x != y);
            if (op == "<")
                return ok(x < y);
            if (op == "<=")
                return ok(x <= y);
            if (op == ">")
                return ok(x > y);
            if (op == ">=")
                return ok(x >= y);
            if (op == "&&")
                return ok(x && y);
            if (op == "||")
                return ok(x || y);
            return fail("operator " + op + " is not supported in constant expressions");
        }
        case ExprKind::BitSelect:
        case ExprKind::PartSelect: return fail("bit selects are not constant");
        case ExprKind::Call: return fail("function calls are not constant");
    }
    return std::nullopt;
}

ConstLookup scope_lookup(const SymbolTable& table, ScopeId scope) {
    return [&table, scope](const Expr& path, Diagnostics& diags) {
        return lookup_impl(table, scope, path, diags, std::make_shared<std::set<SymbolKey>>());
    };
}

// ---------------------------------------------------------------------------
// Literals

std::optional<SizedLiteral> parse_sized_literal(std::string_view text) {
    auto tick = text.find('\'');
    if (tick == std::string_view::npos || tick + 1 >= text.size())
        return std::nullopt;
    SizedLiteral lit;
    for (char c : text.substr(0, tick)) {
        if (c == '_')
            continue;
        if (c < '0' || c > '9')
            return std::nullopt;
        auto d = static_cast<std::uint64_t>(c - '0');
        lit.width = lit.width > (std::numeric_limits<std::uint64_t>::max() - d) / 10
                        ? std::numeric_limits<std::uint64_t>::max()
                        : lit.width * 10 + d;
    }
    switch (text[tick + 1]) {
        case 'b':
        case 'B': lit.base = 2; break;
        case 'd':
        case 'D': lit.base = 10; break;
        case 'h':
        case 'H': lit.base = 16; break;
        default: return std::nullopt;
    }
    for (char c : text.substr(tick + 2)) {
        if (c == '_')
            continue;
        if (!is_base_digit(text[tick + 1], c))
            return std::nullopt;
        lit.digits += c;
    }
    if (lit.digits.empty())
        return std::nullopt;
    return lit;
}

std::size_t literal_bit_length(const SizedLiteral& lit) {
    auto limbs = literal_limbs(lit);
    while (!limbs.empty() && limbs.back() == 0)
        limbs.pop_back();
    if (limbs.empty())
        return 0;
    return 32 * (limbs.size() - 1) + static_cast<std::size_t>(std::bit_width(limbs.back()));
}

std::optional<std::uint64_t> literal_value(const SizedLiteral& lit) {
    auto limbs = literal_limbs(lit);
    while (!limbs.empty() && limbs.back() == 0)
        limbs.pop_back();
    if (limbs.size() > 2)
        return std::nullopt;
    std::uint64_t v = 0;
    for (std::size_t i = limbs.size(); i-- > 0;)
        v = (v << 32) | limbs[i];
    return v;
}

Diagnostics check_literal_widths(const Expr& expr) {
    Diagnostics diags;
    for_each_expr(expr, [&](const Expr& e) {
        if (e.kind != ExprKind::SizedLiteral)
            return;
        auto lit = parse_sized_literal(e.text);
        if (!lit)
            return;
        if (lit->width == 0) {
            diags.push_back(error_at("E0311", "literal " + e.text + " has zero width", e.span));
            return;
        }
        std::size_t bits = literal_bit_length(*lit);
        if (bits > lit->width) {
            diags.push_back(error_at("E0311",
                                     "literal " + e.text + " needs " + std::to_string(bits) + " bits but is " +
                                         std::to_string(lit->width) + " bits wide",
                                     e.span));
        }
    });
    return diags;
}

// ---------------------------------------------------------------------------
// Clock and reset binding

namespace {

const IfStmt* find_if_reset(const Block& block);

const IfStmt* find_if_reset(const Stmt& s) {
    if (const auto* i = std::get_if<IfStmt>(&s.node)) {
        if (i->is_reset)
            return i;
        if (auto found = find_if_reset(i->then_block))
            return found;
        for (const ElseClause& e : i->else_clause) {
            const IfStmt* found = std::visit(
                Overloaded{[](const Block& b) { return find_if_reset(b); },
                           [](const Stmt& n) { return find_if_reset(n); }},
                e.body);
            if (found)
                return found;
        }
    }
    if (const auto* b = std::get_if<Block>(&s.node))
        return find_if_reset(*b);
    return nullptr;
}

const IfStmt* find_if_reset(const Block& block) {
    for (const Stmt& s : block.stmts)
        if (auto found = find_if_reset(s))
            return found;
    return nullptr;
}

SignalRef to_ref(const SignalInfo& s) { return SignalRef{s.name, s.type->kind, s.domain, s.span}; }

}  // namespace

bool uses_if_reset(const Block& block) { return find_if_reset(block) != nullptr; }

std::optional<ClockResetBinding> bind_clock_reset(const ConcreteModule& module, const AlwaysFf& ff, Span ff_span,
                                                  Diagnostics* diags) {
    Signals signals = collect_signals(module.decl);
    auto report = [&](const char* code, std::string msg, Span span, std::vector<Span> related = {}) {
        if (diags)
            diags->push_back(error_at(code, std::move(msg), span, std::move(related)));
    };
    const IfStmt* if_reset = find_if_reset(ff.body);

    if (!ff.sensitivity.empty()) {
        const SensitivityName& clk_name = ff.sensitivity[0];
        const SignalInfo* clk = signals.find(clk_name.name);
        if (!clk)
            return std::nullopt;
        if (!is_clock_kind(clk->type->kind)) {
            report("E0314", q(clk->name) + " is not a clock and cannot be used as a sensitivity clock",
                   clk_name.span, {clk->span});
            return std::nullopt;
        }
        ClockResetBinding binding{to_ref(*clk), std::nullopt};
        if (ff.sensitivity.size() > 1) {
            const SensitivityName& rst_name = ff.sensitivity[1];
            const SignalInfo* rst = signals.find(rst_name.name);
            if (!rst)
                return std::nullopt;
            if (!is_reset_kind(rst->type->kind)) {
                report("E0314", q(rst->name) + " is not a reset and cannot be used as a sensitivity reset",
                       rst_name.span, {rst->span});
                return std::nullopt;
            }
            binding.reset = to_ref(*rst);
        }
        else if (if_reset) {
            report("E0313", "if_reset is used but this always_ff has no reset", if_reset->keyword);
            return std::nullopt;
        }
        return binding;
    }

    std::vector<const SignalInfo*> clocks;
    std::vector<const SignalInfo*> resets;
    for (const SignalInfo& s : signals.list) {
        if (is_clock_kind(s.type->kind))
            clocks.push_back(&s);
        else if (is_reset_kind(s.type->kind))
            resets.push_back(&s);
    }
    auto spans = [](const std::vector<const SignalInfo*>& list) {
        std::vector<Span> out;
        for (const SignalInfo* s : list)
            out.push_back(s->span);
        return out;
    };
    if (clocks.size() != 1) {
        report("E0312",
               "always_ff without a sensitivity list needs exactly one clock in scope, found " +
                   std::to_string(clocks.size()),
               ff_span, spans(clocks));
        return std::nullopt;
    }
    ClockResetBinding binding{to_ref(*clocks[0]), std::nullopt};
    if (if_reset) {
        if (resets.size() != 1) {
            report("E0312",
                   "always_ff without a sensitivity list needs exactly one reset in scope, found " +
                       std::to_string(resets.size()),
                   ff_span, spans(resets));
            return std::nullopt;
        }
        binding.reset = to_ref(*resets[0]);
    }
    return binding;
}

// ---------------------------------------------------------------------------
// Latches

namespace {

struct MustMay {
    std::set<std::string> may;
    std::set<std::string> must;
};

class LatchFinder {
public:
    std::vector<LatchFinding> run(const Block& b) {
        MustMay r = block(b);
        std::vector<LatchFinding> out;
        for (const LatchFinding& f : order_)
            if (!r.must.count(f.name))
                out.push_back(f);
        return out;
    }

private:
    MustMay block(const Block& b) {
        MustMay acc;
        for (const Stmt& s : b.stmts) {
            MustMay r = stmt(s);
            acc.may.insert(r.may.begin(), r.may.end());
            acc.must.insert(r.must.begin(), r.must.end());
        }
        return acc;
    }

    MustMay stmt(const Stmt& s) {
        return std::visit(Overloaded{
                              [&](const AssignStmt& a) {
                                  MustMay r;
                                  if (const Expr* root = lvalue_root(a.target)) {
                                      std::string name = join_path(root->path);
                                      if (!seen_.count(name)) {
                                          seen_.insert(name);
                                          order_.push_back(LatchFinding{name, a.target.span});
                                      }
                                      r.may.insert(name);
                                      r.must.insert(name);
                                  }
                                  return r;
                              },
                              [&](const IfStmt& i) {
                                  MustMay then = block(i.then_block);
                                  MustMay other;
                                  for (const ElseClause& e : i.else_clause) {
                                      other = std::visit(Overloaded{[&](const Block& b) { return block(b); },
                                                                    [&](const Stmt& n) { return stmt(n); }},
                                                         e.body);
                                  }
                                  MustMay r;
                                  r.may = then.may;
                                  r.may.insert(other.may.begin(), other.may.end());
                                  std::set_intersection(then.must.begin(), then.must.end(), other.must.begin(),
                                                        other.must.end(), std::inserter(r.must, r.must.end()));
                                  return r;
                              },
                              [&](const ReturnStmt&) { return MustMay{}; },
                              [&](const Block& b) { return block(b); },
                          },
                          s.node);
    }

    std::vector<LatchFinding> order_;
    std::set<std::string> seen_;
};

}  // namespace

std::vector<LatchFinding> find_latches(const Block& block) { return LatchFinder().run(block); }

// ---------------------------------------------------------------------------
// Domains

Domain join(const Domain& a, const Domain& b) {
    if (a.kind == DomainKind::Default)
        return b;
    if (b.kind == DomainKind::Default)
        return a;
    if (a == b)
        return a;
    return Domain{DomainKind::Mixed, ""};
}

bool crosses(const Domain& signal, const Domain& process) {
    if (process.kind != DomainKind::Named)
        return false;
    if (signal.kind == DomainKind::Mixed)
        return true;
    return signal.kind == DomainKind::Named && signal.name != process.name;
}

namespace {

Domain named_or_default(const std::optional<std::string>& name) {
    return name ? Domain{DomainKind::Named, *name} : Domain{};
}

std::string describe(const Domain& d) {
    switch (d.kind) {
        case DomainKind::Default: return "the default domain";
        case DomainKind::Named: return "domain `" + d.name;
        case DomainKind::Mixed: return "mixed domains";
    }
    return "";
}

std::optional<Domain> process_domain(const ConcreteModule& m, const Process& p) {
    const auto& ff = std::get<AlwaysFf>(p.item->node);
    auto binding = bind_clock_reset(m, ff, p.span, nullptr);
    if (!binding)
        return std::nullopt;
    return named_or_default(binding->clock.domain);
}

}  // namespace

std::map<std::string, Domain> infer_domains(const ConcreteModule& module, const Design& design) {
    Signals signals = collect_signals(module.decl);
    std::vector<Process> procs = ProcessCollector(module, design).run();
    std::map<std::string, Domain> dom;
    for (const SignalInfo& s : signals.list)
        dom[s.name] = named_or_default(s.domain);

    auto fixed = [&](const std::string& name) {
        const SignalInfo* s = signals.find(name);
        return s && s->domain;
    };

    for (const Process& p : procs) {
        if (p.kind != ProcKind::Ff)
            continue;
        auto d = process_domain(module, p);
        if (!d)
            continue;
        for (const Assignment& a : p.assigns)
            if (!fixed(a.target.name))
                dom[a.target.name] = join(dom[a.target.name], *d);
    }

    // Combinational results take the join of their sources; iterate to a fixed
    // point since comb logic may chain.
    bool changed = true;
    for (std::size_t round = 0; changed && round <= signals.list.size() * 2 + 2; ++round) {
        changed = false;
        for (const Process& p : procs) {
            if (p.kind != ProcKind::Comb && p.kind != ProcKind::Assign)
                continue;
            for (const Assignment& a : p.assigns) {
                if (fixed(a.target.name))
                    continue;
                Domain d = dom[a.target.name];
                for (const Access& s : a.sources)
                    d = join(d, dom[s.name]);
                if (!(d == dom[a.target.name])) {
                    dom[a.target.name] = d;
                    changed = true;
                }
            }
        }
    }
    return dom;
}

// ---------------------------------------------------------------------------
// Per-module checks

Diagnostics check_consts(const ConcreteModule& m) {
    Diagnostics diags;
    ConstLookup lookup = scope_lookup(*m.table, m.scope);
    auto eval = [&](const Expr& e) { eval_const(e, lookup, diags); };
    auto type = [&](const TypeSpec& t) { walk_type_exprs(t, eval); };
    for (const ParamDecl& p : m.decl.params) {
        type(p.type);
        eval(p.value);
    }
    for (const PortDecl& p : m.decl.ports)
        type(p.type);

    for_each_item(m.decl.body, [&](const ModuleItem& item, bool) {
        std::visit(Overloaded{
                       [&](const VarDecl& v) { type(v.type); },
                       [&](const ConstDecl& c) {
                           type(c.type);
                           eval(c.value);
                       },
                       [&](const FunctionDecl& f) {
                           ConstLookup inner = scope_lookup(*m.table, m.table->scope_of(f).value_or(m.scope));
                           for (const FunctionArg& a : f.args)
                               walk_type_exprs(a.type, [&](const Expr& e) { eval_const(e, inner, diags); });
                           walk_type_exprs(f.return_type, [&](const Expr& e) { eval_const(e, inner, diags); });
                       },
                       [](const auto&) {},
                   },
                   item.node);
    });
    walk_items_exprs(m.decl.body, *m.table, m.scope, [&](const Expr& e, ScopeId scope) {
        ConstLookup l = scope_lookup(*m.table, scope);
        for_each_expr(e, [&](const Expr& sub) {
            if (sub.kind == ExprKind::PartSelect) {
                eval_const(sub.operands[1], l, diags);
                eval_const(sub.operands[2], l, diags);
            }
        });
    });
    return diags;
}

Diagnostics check_drivers(const ConcreteModule& m, const Design& design) {
    Diagnostics diags;
    Signals signals = collect_signals(m.decl);
    std::vector<Process> procs = ProcessCollector(m, design).run();

    struct Site {
        std::pair<std::size_t, std::size_t> key;
        Span span;
    };
    std::map<std::string, std::vector<Site>> drivers;
    std::set<std::string> reads;
    std::set<std::string> maybe_driven;
    for (std::size_t i = 0; i < procs.size(); ++i) {
        const Process& p = procs[i];
        for (std::size_t k = 0; k < p.assigns.size(); ++k) {
            const Access& t = p.assigns[k].target;
            std::pair<std::size_t, std::size_t> key{i, p.kind == ProcKind::Inst ? k : 0};
            auto& sites = drivers[t.name];
            if (std::none_of(sites.begin(), sites.end(), [&](const Site& s) { return s.key == key; }))
                sites.push_back(Site{key, t.span});
        }
        for (const Access& r : p.reads)
            reads.insert(r.name);
        for (const Access& u : p.unknown)
            maybe_driven.insert(u.name);
    }

    for (const SignalInfo& s : signals.list) {
        bool input = s.is_port && s.direction == Direction::Input;
        bool output = s.is_port && s.direction == Direction::Output;
        const auto& sites = drivers[s.name];
        if (input)
            continue;  // assignments to inputs are E0306
        if (sites.size() > 1) {
            std::vector<Span> related;
            related.push_back(sites[0].span);
            for (std::size_t i = 2; i < sites.size(); ++i)
                related.push_back(sites[i].span);
            diags.push_back(error_at("E0302", q(s.name) + " is driven from more than one place", sites[1].span,
                                     std::move(related)));
        }
        bool read = reads.count(s.name) > 0;
        if (sites.empty() && !maybe_driven.count(s.name)) {
            if (output)
                diags.push_back(error_at("E0303", "output " + q(s.name) + " is never assigned", s.span));
            else if (read)
                diags.push_back(error_at("E0303", q(s.name) + " is read but never assigned", s.span));
        }
        if (!s.is_port && !read)
            diags.push_back(error_at("W0304", "variable " + q(s.name) + " is never read", s.span));
    }
    return diags;
}

Diagnostics check_latches(const ConcreteModule& m) {
    Diagnostics diags;
    for_each_item(m.decl.body, [&](const ModuleItem& item, bool) {
        if (const auto* comb = std::get_if<AlwaysComb>(&item.node)) {
            for (const LatchFinding& f : find_latches(comb->body)) {
                diags.push_back(error_at("W0305", q(f.name) + " is not assigned on every path; a latch is inferred",
                                         f.first_assignment));
            }
        }
    });
    return diags;
}

Diagnostics check_direction(const ConcreteModule& m, const Design& design) {
    Diagnostics diags;
    Signals signals = collect_signals(m.decl);
    for (const Process& p : ProcessCollector(m, design).run()) {
        for (const Assignment& a : p.assigns) {
            const SignalInfo* s = signals.find(a.target.name);
            if (s && s->is_port && s->direction == Direction::Input)
                diags.push_back(
                    error_at("E0306", "input port " + q(s->name) + " cannot be assigned", a.target.span, {s->span}));
        }
        for (Span span : p.non_lvalue_outputs)
            diags.push_back(error_at("E0306", "an output port must be connected to an assignable signal", span));
    }
    return diags;
}

Diagnostics check_connectivity(const ConcreteModule& m, const Design& design) {
    Diagnostics diags;
    auto connections = [&](const std::vector<Connection>& conns, const std::set<std::string>& known,
                           const std::string& what, const std::string& child) {
        std::map<std::string, Span> seen;
        for (const Connection& c : conns) {
            if (!known.count(c.name)) {
                diags.push_back(
                    error_at("E0307", "module " + q(child) + " has no " + what + " named " + q(c.name), c.name_span));
                continue;
            }
            auto [it, inserted] = seen.emplace(c.name, c.name_span);
            if (!inserted)
                diags.push_back(
                    error_at("E0309", what + " " + q(c.name) + " is connected more than once", c.name_span,
                             {it->second}));
        }
        return seen;
    };

    for_each_item(m.decl.body, [&](const ModuleItem& item, bool) {
        const auto* inst = std::get_if<InstDecl>(&item.node);
        if (!inst)
            return;
        const ConcreteModule* child = child_of(m, design, *inst);
        if (!child)
            return;
        const std::string& child_name = child->source->name;
        std::set<std::string> params;
        for (const ParamDecl& p : child->decl.params)
            params.insert(p.name);
        std::set<std::string> ports;
        for (const PortDecl& p : child->decl.ports)
            ports.insert(p.name);
        connections(inst->params, params, "param", child_name);
        auto connected = connections(inst->ports, ports, "port", child_name);
        for (const PortDecl& p : child->decl.ports) {
            if (!connected.count(p.name))
                diags.push_back(error_at("E0308", "port " + q(p.name) + " of " + q(child_name) + " is not connected",
                                         inst->name_span, {p.name_span}));
        }
    });

    walk_module_exprs(m, [&](const Expr& root, ScopeId scope) {
        for_each_expr(root, [&](const Expr& e) {
            if (e.kind != ExprKind::Call)
                return;
            Resolution r = resolve(*m.table, e.path, scope, UseKind::Function, e.span);
            if (!r.path)
                return;
            const FunctionDecl* f = r.path->symbol().as<FunctionDecl>();
            if (f && f->args.size() != e.operands.size())
                diags.push_back(error_at("E0310",
                                         "function " + q(f->name) + " takes " + std::to_string(f->args.size()) +
                                             " argument(s) but " + std::to_string(e.operands.size()) +
                                             " were given",
                                         e.span, {f->name_span}));
        });
    });
    return diags;
}

Diagnostics check_clock_reset(const ConcreteModule& m) {
    Diagnostics diags;
    for_each_item(m.decl.body, [&](const ModuleItem& item, bool) {
        if (const auto* ff = std::get_if<AlwaysFf>(&item.node))
            bind_clock_reset(m, *ff, item.span, &diags);
    });

    Signals signals = collect_signals(m.decl);
    Design empty;
    auto check = [&](const Access& a, bool assigned) {
        const SignalInfo* s = signals.find(a.name);
        if (!s || a.connection)
            return;
        TypeKind k = s->type->kind;
        if (!is_clock_kind(k) && !is_reset_kind(k))
            return;
        diags.push_back(error_at("E0315",
                                 std::string(is_clock_kind(k) ? "clock " : "reset ") + q(s->name) +
                                     (assigned ? " cannot be assigned" : " cannot be used as data"),
                                 a.span, {s->span}));
    };
    for (const Process& p : ProcessCollector(m, empty).run()) {
        for (const Access& r : p.reads)
            check(r, false);
        for (const Assignment& a : p.assigns)
            check(a.target, true);
    }
    return diags;
}

Diagnostics check_cdc(const ConcreteModule& m, const Design& design) {
    Diagnostics diags;
    Signals signals = collect_signals(m.decl);
    std::map<std::string, Domain> dom = infer_domains(m, design);
    for (const Process& p : ProcessCollector(m, design).run()) {
        if (p.kind != ProcKind::Ff || p.unsafe_cdc)
            continue;
        auto pd = process_domain(m, p);
        if (!pd)
            continue;
        for (const Access& r : p.reads) {
            const Domain& sd = dom[r.name];
            if (!crosses(sd, *pd))
                continue;
            const SignalInfo* s = signals.find(r.name);
            diags.push_back(error_at("E0316",
                                     q(r.name) + " belongs to " + describe(sd) + " but is read in a process clocked by " +
                                         describe(*pd) + "; wrap intended crossings in unsafe (cdc)",
                                     r.span, s ? std::vector<Span>{s->span} : std::vector<Span>{}));
        }
    }
    return diags;
}

namespace {

void append(Diagnostics& out, Diagnostics more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

void check_package(const SymbolTable& table, const PackageDecl& pkg, Diagnostics& diags) {
    ScopeId scope = table.scope_of(pkg).value_or(SymbolTable::kRoot);
    ConstLookup lookup = scope_lookup(table, scope);
    auto literals = [&](const Expr& e) { append(diags, check_literal_widths(e)); };
    for (const PackageItem& item : pkg.items) {
        std::visit(Overloaded{
                       [&](const ConstDecl& c) {
                           walk_type_exprs(c.type, [&](const Expr& e) {
                               eval_const(e, lookup, diags);
                               literals(e);
                           });
                           eval_const(c.value, lookup, diags);
                           literals(c.value);
                       },
                       [&](const FunctionDecl& f) {
                           ScopeId inner = table.scope_of(f).value_or(scope);
                           walk_function_exprs(f, [&](const Expr& root) {
                               literals(root);
                               for_each_expr(root, [&](const Expr& e) {
                                   if (e.kind != ExprKind::Call)
                                       return;
                                   Resolution r = resolve(table, e.path, inner, UseKind::Function, e.span);
                                   if (!r.path)
                                       return;
                                   const FunctionDecl* callee = r.path->symbol().as<FunctionDecl>();
                                   if (callee && callee->args.size() != e.operands.size())
                                       diags.push_back(error_at(
                                           "E0310",
                                           "function " + q(callee->name) + " takes " +
                                               std::to_string(callee->args.size()) + " argument(s) but " +
                                               std::to_string(e.operands.size()) + " were given",
                                           e.span, {callee->name_span}));
                               });
                           });
                       },
                   },
                   item.node);
    }
}

}  // namespace

Diagnostics analyze(const Design& design, const std::vector<const SymbolTable*>& tables) {
    Diagnostics diags;
    for (const ConcreteModule& m : design.modules) {
        append(diags, check_consts(m));
        walk_module_exprs(m, [&](const Expr& e, ScopeId) { append(diags, check_literal_widths(e)); });
        append(diags, check_drivers(m, design));
        append(diags, check_latches(m));
        append(diags, check_direction(m, design));
        append(diags, check_connectivity(m, design));
        append(diags, check_clock_reset(m));
        append(diags, check_cdc(m, design));
    }
    for (const SymbolTable* table : tables) {
        for (SymbolId id : table->packages()) {
            if (const PackageDecl* pkg = table->symbol(id).as<PackageDecl>())
                check_package(*table, *pkg, diags);
        }
    }
    sort_diagnostics(diags);
    return diags;
}

}  // namespace vl
