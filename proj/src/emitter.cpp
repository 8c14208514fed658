#include "vl/emitter.hpp"

#include <algorithm>
#include <fstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "vl/analyzer.hpp"
#include "vl/parser.hpp"

namespace vl {

std::optional<ClockEdge> parse_clock_type(std::string_view text) {
    if (text == "posedge")
        return ClockEdge::Posedge;
    if (text == "negedge")
        return ClockEdge::Negedge;
    return std::nullopt;
}

std::optional<ResetType> parse_reset_type(std::string_view text) {
    if (text == "async_low")
        return ResetType::AsyncLow;
    if (text == "async_high")
        return ResetType::AsyncHigh;
    if (text == "sync_low")
        return ResetType::SyncLow;
    if (text == "sync_high")
        return ResetType::SyncHigh;
    return std::nullopt;
}

const char* to_string(ClockEdge edge) { return edge == ClockEdge::Posedge ? "posedge" : "negedge"; }

const char* to_string(ResetType type) {
    switch (type) {
        case ResetType::AsyncLow: return "async_low";
        case ResetType::AsyncHigh: return "async_high";
        case ResetType::SyncLow: return "sync_low";
        case ResetType::SyncHigh: return "sync_high";
    }
    return "async_low";
}

ClockEdge effective_edge(TypeKind clock, const EmitConfig& cfg) {
    switch (clock) {
        case TypeKind::ClockPosedge: return ClockEdge::Posedge;
        case TypeKind::ClockNegedge: return ClockEdge::Negedge;
        default: return cfg.clock_type;
    }
}

ResetType effective_reset(TypeKind reset, const EmitConfig& cfg) {
    switch (reset) {
        case TypeKind::ResetAsyncHigh: return ResetType::AsyncHigh;
        case TypeKind::ResetAsyncLow: return ResetType::AsyncLow;
        case TypeKind::ResetSyncHigh: return ResetType::SyncHigh;
        case TypeKind::ResetSyncLow: return ResetType::SyncLow;
        default: return cfg.reset_type;
    }
}

namespace {

bool is_async(ResetType t) { return t == ResetType::AsyncLow || t == ResetType::AsyncHigh; }
bool is_low(ResetType t) { return t == ResetType::AsyncLow || t == ResetType::SyncLow; }

std::string expr_text(const Expr& e, const PathPrinter& paths) { return format_expr(e, paths); }

// `N-1`, folded when N is a plain decimal literal.
std::string minus_one(const Expr& e, const PathPrinter& paths) {
    if (e.kind == ExprKind::DecimalLiteral) {
        std::string digits;
        for (char c : e.text)
            if (c != '_')
                digits += c;
        if (digits.size() < 19 && !digits.empty()) {
            unsigned long long v = std::stoull(digits);
            if (v > 0)
                return std::to_string(v - 1);
        }
    }
    std::string text = expr_text(e, paths);
    if (e.kind == ExprKind::Binary && binary_precedence(e.text) < binary_precedence("-"))
        text = "(" + text + ")";
    return text + "-1";
}

}  // namespace

std::string lower_type(const TypeSpec& type, const PathPrinter& paths) {
    std::string out;
    switch (type.kind) {
        case TypeKind::U32: return "int unsigned";
        case TypeKind::U64: return "longint unsigned";
        case TypeKind::Bit: out = "bit"; break;
        default: out = "logic"; break;
    }
    if (!type.packed_dims.empty()) {
        out += ' ';
        for (const Expr& d : type.packed_dims)
            out += "[" + minus_one(d, paths) + ":0]";
    }
    return out;
}

std::string lower_unpacked(const TypeSpec& type, const PathPrinter& paths) {
    std::string out;
    if (!type.unpacked_dims.empty()) {
        out += ' ';
        for (const Expr& d : type.unpacked_dims)
            out += "[0:" + minus_one(d, paths) + "]";
    }
    return out;
}

namespace {

constexpr std::string_view kIndent = "  ";

// Prints paths as SystemVerilog names: dependency namespaces are dropped
// since emitted modules and packages share one global namespace.
PathPrinter sv_paths(const SymbolTable& table, ScopeId scope) {
    return [&table, scope](const PathName& path) {
        if (path.size() > 1) {
            Resolution r = resolve(table, path, scope, UseKind::Any, Span{});
            if (r.path && r.path->dependency)
                return join_path(PathName(path.begin() + 1, path.end()));
        }
        return join_path(path);
    };
}

class ModuleEmitter {
public:
    ModuleEmitter(const SymbolTable& table, ScopeId scope, const ConcreteModule* m, const EmitConfig& cfg)
        : table_(table), scope_(scope), m_(m), cfg_(cfg), paths_(sv_paths(table, scope)) {}

    std::string run() {
        const ModuleDecl& d = m_->decl;
        comments(m_->source->comments.leading);
        out_ += "module " + m_->name;
        if (d.params.empty() && d.ports.empty()) {
            out_ += ";\n";
        }
        else {
            if (!d.params.empty()) {
                out_ += " #(\n";
                for (std::size_t i = 0; i < d.params.size(); ++i) {
                    const ParamDecl& p = d.params[i];
                    out_ += kIndent;
                    out_ += "parameter " + lower_type(p.type, paths_) + ' ' + p.name + lower_unpacked(p.type, paths_) +
                            " = " + expr(p.value);
                    if (i + 1 < d.params.size())
                        out_ += ',';
                    trailing(p.comments);
                    out_ += '\n';
                }
                out_ += ')';
            }
            if (!d.ports.empty()) {
                out_ += " (\n";
                for (std::size_t i = 0; i < d.ports.size(); ++i) {
                    const PortDecl& p = d.ports[i];
                    out_ += kIndent;
                    out_ += std::string(to_string(p.direction)) + ' ' + lower_type(p.type, paths_) + ' ' + p.name +
                            lower_unpacked(p.type, paths_);
                    if (i + 1 < d.ports.size())
                        out_ += ',';
                    trailing(p.comments);
                    out_ += '\n';
                }
                out_ += ')';
            }
            out_ += ";\n";
        }
        depth_ = 1;
        items(d.body, true);
        comments(d.dangling);
        out_ += "endmodule\n";
        return std::move(out_);
    }

    std::string package_function(const FunctionDecl& f, const AttachedComments& c) {
        depth_ = 1;
        function(f, c);
        return std::move(out_);
    }

private:
    std::string expr(const Expr& e) const { return expr_text(e, paths_); }

    void indent() {
        for (int i = 0; i < depth_; ++i)
            out_ += kIndent;
    }

    void line(const std::string& text) {
        indent();
        out_ += text;
        out_ += '\n';
    }

    void comments(const std::vector<Comment>& list) {
        for (const Comment& c : list)
            line(c.text);
    }

    void trailing(const AttachedComments& c) {
        for (const Comment& comment : c.trailing)
            out_ += ' ' + comment.text;
    }

    void items(const std::vector<ModuleItem>& list, bool top) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const ModuleItem& item = list[i];
            if (const auto* u = std::get_if<UnsafeCdc>(&item.node)) {
                if (item.comments.blank_line_before && !(top && i == 0))
                    out_ += '\n';
                comments(item.comments.leading);
                items(u->items, false);
                continue;
            }
            if (item.comments.blank_line_before && !(top && i == 0))
                out_ += '\n';
            comments(item.comments.leading);
            module_item(item);
        }
    }

    void end_line(const AttachedComments& c) {
        trailing(c);
        out_ += '\n';
    }

    void module_item(const ModuleItem& item) {
        std::visit(Overloaded{
                       [&](const VarDecl& v) {
                           indent();
                           out_ += lower_type(v.type, paths_) + ' ' + v.name + lower_unpacked(v.type, paths_) + ';';
                           end_line(item.comments);
                       },
                       [&](const ConstDecl& c) {
                           indent();
                           out_ += "localparam " + lower_type(c.type, paths_) + ' ' + c.name +
                                   lower_unpacked(c.type, paths_) + " = " + expr(c.value) + ';';
                           end_line(item.comments);
                       },
                       [&](const InstDecl& i) { inst(i, item.comments); },
                       [&](const AssignDecl& a) {
                           indent();
                           out_ += "assign " + expr(a.target) + " = " + expr(a.value) + ';';
                           end_line(item.comments);
                       },
                       [&](const AlwaysFf& a) { always_ff(a, item); },
                       [&](const AlwaysComb& a) {
                           indent();
                           out_ += "always_comb begin";
                           end_line(item.comments);
                           body(a.body, false);
                           line("end");
                       },
                       [&](const FunctionDecl& f) { function(f, item.comments); },
                       [](const UnsafeCdc&) {},
                   },
                   item.node);
    }

    void connections(const std::vector<Connection>& conns) {
        for (std::size_t i = 0; i < conns.size(); ++i) {
            const Connection& c = conns[i];
            comments(c.comments.leading);
            indent();
            out_ += '.' + c.name + " (" + expr(c.value) + ')';
            if (i + 1 < conns.size())
                out_ += ',';
            end_line(c.comments);
        }
    }

    void inst(const InstDecl& i, const AttachedComments& c) {
        indent();
        auto child = m_->children.find(i.name);
        out_ += child != m_->children.end() ? child->second : join_path(i.target, "_");
        if (!i.params.empty()) {
            out_ += " #(\n";
            ++depth_;
            connections(i.params);
            --depth_;
            indent();
            out_ += ')';
        }
        out_ += ' ' + i.name + " (";
        if (i.ports.empty()) {
            out_ += ");";
            end_line(c);
            return;
        }
        out_ += '\n';
        ++depth_;
        connections(i.ports);
        --depth_;
        indent();
        out_ += ");";
        end_line(c);
    }

    void function(const FunctionDecl& f, const AttachedComments& c) {
        ScopeId scope = table_.scope_of(f).value_or(scope_);
        PathPrinter saved = paths_;
        paths_ = sv_paths(table_, scope);
        indent();
        out_ += "function automatic " + lower_type(f.return_type, paths_) + ' ' + f.name + '(';
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            if (i)
                out_ += ", ";
            out_ += "input " + lower_type(f.args[i].type, paths_) + ' ' + f.args[i].name +
                    lower_unpacked(f.args[i].type, paths_);
        }
        out_ += ");";
        end_line(c);
        body(f.body, false);
        line("endfunction");
        paths_ = saved;
    }

    void always_ff(const AlwaysFf& a, const ModuleItem& item) {
        auto binding = bind_clock_reset(*m_, a, item.span, nullptr);
        std::string sens;
        std::optional<ResetType> reset;
        std::string reset_name;
        if (binding) {
            sens = std::string(to_string(effective_edge(binding->clock.kind, cfg_))) + ' ' + binding->clock.name;
            if (binding->reset) {
                reset = effective_reset(binding->reset->kind, cfg_);
                reset_name = binding->reset->name;
                if (is_async(*reset))
                    sens += std::string(" or ") + (is_low(*reset) ? "negedge " : "posedge ") + reset_name;
            }
        }
        else {
            sens = std::string(to_string(cfg_.clock_type)) + ' ' +
                   (a.sensitivity.empty() ? std::string("clk") : a.sensitivity[0].name);
        }
        indent();
        out_ += "always_ff @ (" + sens + ") begin";
        end_line(item.comments);
        reset_condition_ = reset ? (is_low(*reset) ? "!" : "") + reset_name : std::string("rst");
        body(a.body, true);
        line("end");
    }

    // Statements of a block one level deeper than the current line.
    void body(const Block& b, bool sequential) {
        ++depth_;
        for (const Stmt& s : b.stmts)
            stmt(s, sequential);
        comments(b.dangling);
        --depth_;
    }

    void stmt(const Stmt& s, bool sequential) {
        if (s.comments.blank_line_before)
            out_ += '\n';
        comments(s.comments.leading);
        std::visit(Overloaded{
                       [&](const AssignStmt& a) {
                           indent();
                           std::string target = expr(a.target);
                           std::string op = sequential ? "<=" : "=";
                           if (a.op == "=") {
                               out_ += target + ' ' + op + ' ' + expr(a.value) + ';';
                           }
                           else {
                               std::string binop = a.op.substr(0, a.op.size() - 1);
                               out_ += target + ' ' + op + ' ' + target + ' ' + binop + " (" + expr(a.value) + ");";
                           }
                           end_line(s.comments);
                       },
                       [&](const IfStmt& i) {
                           indent();
                           if_chain(i, sequential, s.comments);
                       },
                       [&](const ReturnStmt& r) {
                           indent();
                           out_ += "return " + expr(r.value) + ';';
                           end_line(s.comments);
                       },
                       [&](const Block& b) {
                           line("begin");
                           body(b, sequential);
                           line("end");
                       },
                   },
                   s.node);
    }

    // Writes `if (...) begin ... end [else ...]` starting at the current column.
    void if_chain(const IfStmt& i, bool sequential, const AttachedComments& c) {
        std::string cond = i.is_reset ? reset_condition_ : expr(i.condition);
        out_ += "if (" + cond + ") begin";
        end_line(c);
        body(i.then_block, sequential);
        indent();
        out_ += "end";
        for (const ElseClause& e : i.else_clause) {
            if (const auto* b = std::get_if<Block>(&e.body)) {
                out_ += " else begin\n";
                body(*b, sequential);
                indent();
                out_ += "end";
            }
            else {
                const Stmt& nested = std::get<Stmt>(e.body);
                out_ += " else ";
                if_chain(std::get<IfStmt>(nested.node), sequential, nested.comments);
                return;
            }
        }
        out_ += '\n';
    }

    const SymbolTable& table_;
    ScopeId scope_;
    const ConcreteModule* m_;
    const EmitConfig& cfg_;
    PathPrinter paths_;
    std::string out_;
    int depth_ = 0;
    std::string reset_condition_;
};

}  // namespace

EmitUnit emit_module(const ConcreteModule& module, const EmitConfig& cfg) {
    EmitUnit unit;
    unit.module_name = module.name;
    unit.text = ModuleEmitter(*module.table, module.scope, &module, cfg).run();
    if (module.instance)
        unit.name_map[module.instance->template_name] = module.name;
    return unit;
}

std::string emit_package(const PackageDecl& package, const SymbolTable& table) {
    ScopeId scope = table.scope_of(package).value_or(SymbolTable::kRoot);
    PathPrinter paths = sv_paths(table, scope);
    std::string out;
    for (const Comment& c : package.comments.leading)
        out += c.text + '\n';
    out += "package " + package.name + ";\n";
    for (const PackageItem& item : package.items) {
        if (item.comments.blank_line_before)
            out += '\n';
        for (const Comment& c : item.comments.leading)
            out += std::string(kIndent) + c.text + '\n';
        std::visit(Overloaded{
                       [&](const ConstDecl& c) {
                           out += std::string(kIndent) + "localparam " + lower_type(c.type, paths) + ' ' + c.name +
                                  lower_unpacked(c.type, paths) + " = " + format_expr(c.value, paths) + ";\n";
                       },
                       [&](const FunctionDecl& f) {
                           EmitConfig cfg;
                           out += ModuleEmitter(table, scope, nullptr, cfg).package_function(f, item.comments);
                       },
                   },
                   item.node);
    }
    out += "endpackage\n";
    return out;
}

std::vector<EmittedFile> emit_files(const std::vector<EmitInput>& inputs, const Design& design,
                                    const SymbolTable& table, const EmitConfig& cfg) {
    std::vector<EmittedFile> files;
    for (const EmitInput& in : inputs) {
        std::vector<std::string> parts;
        for (const Item& item : in.file->items) {
            if (const auto* pkg = std::get_if<PackageDecl>(&item)) {
                if (table.scope_of(*pkg))
                    parts.push_back(emit_package(*pkg, table));
                continue;
            }
            const auto& decl = std::get<ModuleDecl>(item);
            std::vector<const ConcreteModule*> mods;
            for (const ConcreteModule& m : design.modules)
                if (m.source == &decl && !m.is_template)
                    mods.push_back(&m);
            std::sort(mods.begin(), mods.end(),
                      [](const ConcreteModule* a, const ConcreteModule* b) { return a->name < b->name; });
            for (const ConcreteModule* m : mods)
                parts.push_back(emit_module(*m, cfg).text);
        }
        if (parts.empty())
            continue;
        std::string text;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i)
                text += '\n';
            text += parts[i];
        }
        files.push_back(EmittedFile{in.output_path, std::move(text)});
    }
    return files;
}

std::string name_map_json(const Design& design, const SymbolTable* only) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const GenericInstance& g : design.instances()) {
        if (only) {
            const ConcreteModule* m = design.find(g.mangled_name);
            if (!m || m->table != only)
                continue;
        }
        out[g.mangled_name] = {{"template", g.template_name}, {"args", g.args}};
    }
    return out.dump(2) + "\n";
}

Diagnostics write_files(const std::filesystem::path& out_dir, const std::vector<EmittedFile>& files) {
    namespace fs = std::filesystem;
    Diagnostics diags;
    auto fail = [&](const fs::path& p, const std::string& why) {
        diags.push_back(Diagnostic{"EIO01", Severity::Error, "cannot write " + p.string() + ": " + why, std::nullopt, {}});
    };
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        fail(out_dir, ec.message());
        return diags;
    }
    for (const EmittedFile& f : files) {
        fs::path target = out_dir / f.path;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            fail(target.parent_path(), ec.message());
            continue;
        }
        std::ofstream os(target, std::ios::binary | std::ios::trunc);
        if (!os) {
            fail(target, "open failed");
            continue;
        }
        os << f.text;
        if (!os)
            fail(target, "write failed");
    }
    return diags;
}

}  // namespace vl
