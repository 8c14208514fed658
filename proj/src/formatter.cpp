#include "vl/formatter.hpp"

namespace vl {

namespace {

constexpr std::string_view kIndent = "    ";

std::string default_path(const PathName& path) { return join_path(path); }

void append_expr(std::string& out, const Expr& e, const PathPrinter& paths) {
    switch (e.kind) {
        case ExprKind::Path: out += paths(e.path); break;
        case ExprKind::SizedLiteral:
        case ExprKind::DecimalLiteral: out += e.text; break;
        case ExprKind::Unary:
            out += e.text;
            append_expr(out, e.operands[0], paths);
            break;
        case ExprKind::Binary:
            append_expr(out, e.operands[0], paths);
            out += ' ';
            out += e.text;
            out += ' ';
            append_expr(out, e.operands[1], paths);
            break;
        case ExprKind::BitSelect:
            append_expr(out, e.operands[0], paths);
            out += '[';
            append_expr(out, e.operands[1], paths);
            out += ']';
            break;
        case ExprKind::PartSelect:
            append_expr(out, e.operands[0], paths);
            out += '[';
            append_expr(out, e.operands[1], paths);
            out += ':';
            append_expr(out, e.operands[2], paths);
            out += ']';
            break;
        case ExprKind::Call:
            out += paths(e.path);
            out += '(';
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i)
                    out += ", ";
                append_expr(out, e.operands[i], paths);
            }
            out += ')';
            break;
        case ExprKind::Paren:
            out += '(';
            append_expr(out, e.operands[0], paths);
            out += ')';
            break;
    }
}

class Formatter {
public:
    std::string run(const SourceFile& file) {
        for (std::size_t i = 0; i < file.items.size(); ++i) {
            if (i)
                out_ += '\n';
            std::visit(Overloaded{[&](const ModuleDecl& m) { module(m); },
                                  [&](const PackageDecl& p) { package(p); }},
                       file.items[i]);
        }
        if (!file.dangling.empty()) {
            if (!file.items.empty())
                out_ += '\n';
            for (const Comment& c : file.dangling)
                line(c.text);
        }
        return std::move(out_);
    }

private:
    void indent() {
        for (int i = 0; i < depth_; ++i)
            out_ += kIndent;
    }

    void line(std::string_view text) {
        indent();
        out_ += text;
        out_ += '\n';
    }

    void leading(const AttachedComments& c, bool first_in_list) {
        if (c.blank_line_before && !first_in_list)
            out_ += '\n';
        for (const Comment& comment : c.leading)
            line(comment.text);
    }

    // Finishes the current line with any trailing comments.
    void end_line(const AttachedComments& c) {
        for (const Comment& comment : c.trailing) {
            out_ += ' ';
            out_ += comment.text;
        }
        out_ += '\n';
    }

    // Comments before a closing brace; `after_content` is set when the list
    // above them is not empty.
    void dangling(const std::vector<Comment>& comments, bool after_content) {
        ++depth_;
        for (std::size_t i = 0; i < comments.size(); ++i) {
            if (comments[i].blank_line_before && (i > 0 || after_content))
                out_ += '\n';
            line(comments[i].text);
        }
        --depth_;
    }

    static std::string expr(const Expr& e) { return format_expr(e); }

    void module(const ModuleDecl& m) {
        leading(m.comments, true);
        indent();
        if (m.is_pub)
            out_ += "pub ";
        out_ += "module " + m.name;
        if (m.is_generic()) {
            out_ += "::<";
            for (std::size_t i = 0; i < m.generic_params.size(); ++i)
                out_ += (i ? ", " : "") + m.generic_params[i].name;
            out_ += '>';
        }
        if (m.has_param_list) {
            out_ += " #(";
            if (!m.params.empty()) {
                out_ += '\n';
                ++depth_;
                for (std::size_t i = 0; i < m.params.size(); ++i) {
                    const ParamDecl& p = m.params[i];
                    leading(p.comments, i == 0);
                    indent();
                    out_ += "param " + p.name + ": " + format_type(p.type) + " = " + expr(p.value) + ',';
                    end_line(p.comments);
                }
                --depth_;
                indent();
            }
            out_ += ')';
        }
        if (m.has_port_list) {
            out_ += " (";
            if (!m.ports.empty()) {
                out_ += '\n';
                ++depth_;
                for (std::size_t i = 0; i < m.ports.size(); ++i) {
                    const PortDecl& p = m.ports[i];
                    leading(p.comments, i == 0);
                    indent();
                    out_ += p.name + ": " + to_string(p.direction) + ' ';
                    if (p.domain)
                        out_ += '`' + *p.domain + ' ';
                    out_ += format_type(p.type) + ',';
                    end_line(p.comments);
                }
                --depth_;
                indent();
            }
            out_ += ')';
        }
        out_ += " {\n";
        ++depth_;
        module_items(m.body);
        --depth_;
        dangling(m.dangling, !m.body.empty());
        indent();
        out_ += '}';
        end_line(m.comments);
    }

    void module_items(const std::vector<ModuleItem>& items) {
        for (std::size_t i = 0; i < items.size(); ++i)
            module_item(items[i], i == 0);
    }

    void module_item(const ModuleItem& item, bool first) {
        leading(item.comments, first);
        indent();
        std::visit(Overloaded{
                       [&](const VarDecl& v) {
                           out_ += "var " + v.name + ": ";
                           if (v.domain)
                               out_ += '`' + *v.domain + ' ';
                           out_ += format_type(v.type) + ';';
                       },
                       [&](const ConstDecl& c) { const_decl(c); },
                       [&](const InstDecl& i) { inst(i); },
                       [&](const AssignDecl& a) {
                           out_ += "assign " + expr(a.target) + " = " + expr(a.value) + ';';
                       },
                       [&](const AlwaysFf& a) {
                           out_ += "always_ff ";
                           if (!a.sensitivity.empty()) {
                               out_ += '(';
                               for (std::size_t k = 0; k < a.sensitivity.size(); ++k)
                                   out_ += (k ? ", " : "") + a.sensitivity[k].name;
                               out_ += ") ";
                           }
                           block(a.body);
                       },
                       [&](const AlwaysComb& a) {
                           out_ += "always_comb ";
                           block(a.body);
                       },
                       [&](const UnsafeCdc& u) {
                           out_ += "unsafe (cdc) {\n";
                           ++depth_;
                           module_items(u.items);
                           --depth_;
                           dangling(u.dangling, !u.items.empty());
                           indent();
                           out_ += '}';
                       },
                       [&](const FunctionDecl& f) { function(f); },
                   },
                   item.node);
        end_line(item.comments);
    }

    void const_decl(const ConstDecl& c) {
        out_ += "const " + c.name + ": " + format_type(c.type) + " = " + expr(c.value) + ';';
    }

    void connections(const std::vector<Connection>& conns) {
        out_ += '(';
        if (!conns.empty()) {
            out_ += '\n';
            ++depth_;
            for (std::size_t i = 0; i < conns.size(); ++i) {
                const Connection& c = conns[i];
                leading(c.comments, i == 0);
                indent();
                out_ += c.name + ": " + expr(c.value) + ',';
                end_line(c.comments);
            }
            --depth_;
            indent();
        }
        out_ += ')';
    }

    void inst(const InstDecl& i) {
        out_ += "inst " + i.name + ": " + join_path(i.target);
        if (!i.generic_args.empty()) {
            out_ += "::<";
            for (std::size_t k = 0; k < i.generic_args.size(); ++k)
                out_ += (k ? ", " : "") + join_path(i.generic_args[k].path);
            out_ += '>';
        }
        if (i.has_param_list) {
            out_ += " #";
            connections(i.params);
        }
        if (i.has_port_list) {
            out_ += ' ';
            connections(i.ports);
        }
        out_ += ';';
    }

    void function(const FunctionDecl& f) {
        out_ += "function " + f.name + " (";
        for (std::size_t i = 0; i < f.args.size(); ++i)
            out_ += (i ? ", " : "") + f.args[i].name + ": " + format_type(f.args[i].type);
        out_ += ") -> " + format_type(f.return_type) + ' ';
        block(f.body);
    }

    // Writes `{ ... }` starting on the current line; leaves the cursor after `}`.
    void block(const Block& b) {
        out_ += "{\n";
        ++depth_;
        for (std::size_t i = 0; i < b.stmts.size(); ++i)
            stmt(b.stmts[i], i == 0);
        --depth_;
        dangling(b.dangling, !b.stmts.empty());
        indent();
        out_ += '}';
    }

    void stmt(const Stmt& s, bool first) {
        leading(s.comments, first);
        indent();
        stmt_body(s);
        end_line(s.comments);
    }

    void stmt_body(const Stmt& s) {
        std::visit(Overloaded{
                       [&](const AssignStmt& a) {
                           out_ += expr(a.target) + ' ' + a.op + ' ' + expr(a.value) + ';';
                       },
                       [&](const IfStmt& i) { if_stmt(i); },
                       [&](const ReturnStmt& r) { out_ += "return " + expr(r.value) + ';'; },
                       [&](const Block& b) { block(b); },
                   },
                   s.node);
    }

    void if_stmt(const IfStmt& i) {
        if (i.is_reset)
            out_ += "if_reset ";
        else
            out_ += "if " + expr(i.condition) + ' ';
        block(i.then_block);
        for (const ElseClause& e : i.else_clause) {
            out_ += " else ";
            std::visit(Overloaded{[&](const Block& b) { block(b); },
                                  [&](const Stmt& nested) { stmt_body(nested); }},
                       e.body);
        }
    }

    void package(const PackageDecl& p) {
        leading(p.comments, true);
        indent();
        if (p.is_pub)
            out_ += "pub ";
        out_ += "package " + p.name + " {\n";
        ++depth_;
        for (std::size_t i = 0; i < p.items.size(); ++i) {
            const PackageItem& item = p.items[i];
            leading(item.comments, i == 0);
            indent();
            std::visit(Overloaded{[&](const ConstDecl& c) { const_decl(c); },
                                  [&](const FunctionDecl& f) { function(f); }},
                       item.node);
            end_line(item.comments);
        }
        --depth_;
        dangling(p.dangling, !p.items.empty());
        indent();
        out_ += '}';
        end_line(p.comments);
    }

    std::string out_;
    int depth_ = 0;
};

}  // namespace

std::string format_expr(const Expr& expr, const PathPrinter& paths) {
    std::string out;
    append_expr(out, expr, paths ? paths : PathPrinter(default_path));
    return out;
}

std::string format_type(const TypeSpec& type) {
    std::string out = to_keyword(type.kind);
    auto dims = [&](const std::vector<Expr>& list, char open, char close) {
        if (list.empty())
            return;
        out += open;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i)
                out += ", ";
            out += format_expr(list[i]);
        }
        out += close;
    };
    dims(type.packed_dims, '<', '>');
    dims(type.unpacked_dims, '[', ']');
    return out;
}

std::string format(const SourceFile& file) { return Formatter().run(file); }

}  // namespace vl
