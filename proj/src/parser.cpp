#include "vl/parser.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace vl {

namespace {

constexpr std::array kAssignOps = {"=", "+=", "-=", "*=", "&=", "|=", "^=", "<<=", ">>="};

struct BinaryOp {
    std::string_view op;
    int precedence;
};

constexpr std::array<BinaryOp, 19> kBinaryOps = {{
    {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
    {"<", 7},  {"<=", 7}, {">", 7},  {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},
    {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10}, {"", 0},
}};

// Thrown after the diagnostic has been recorded; caught at the nearest
// recovery point.
struct ParseError {};

class Parser {
public:
    Parser(const SourceManager& sources, const LexResult& lexed, FileId file)
        : text_(sources.text(file)), tokens_(lexed.tokens), comments_(lexed.comments),
          consumed_(lexed.comments.size(), false) {
        file_.file = file;
        for (const DocComment& doc : lexed.docs)
            docs_.push_back(doc);
    }

    ParseResult parse_source() {
        while (!at_eof()) {
            std::size_t start = pos_;
            try {
                file_.items.push_back(parse_item());
            }
            catch (const ParseError&) {
                synchronize(start, /*consume_brace=*/true);
            }
        }
        file_.dangling = dangling_before(pos_);
        return ParseResult{std::move(file_), std::move(diags_)};
    }

    ExprParseResult parse_single_expression() {
        ExprParseResult result;
        try {
            Expr e = parse_expr();
            if (!at_eof())
                unexpected("end of expression");
            result.expr = std::move(e);
        }
        catch (const ParseError&) {
        }
        result.diagnostics = std::move(diags_);
        return result;
    }

private:
    // ----------------------------------------------------------------- tokens

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at_eof() const { return peek().kind == TokenKind::EndOfFile; }
    bool at_punct(std::string_view p) const { return peek().is_punct(p); }
    bool at_keyword(std::string_view k) const { return peek().is_keyword(k); }

    const Token& advance() {
        const Token& t = peek();
        if (!at_eof())
            ++pos_;
        return t;
    }

    [[noreturn]] void unexpected(std::string_view expected) {
        const Token& t = peek();
        std::string found = t.kind == TokenKind::EndOfFile ? "end of file" : "'" + t.text + "'";
        diags_.push_back(Diagnostic::make("E0101", "unexpected " + found + ", expected " + std::string(expected), t.span));
        throw ParseError{};
    }

    const Token& expect_punct(std::string_view p) {
        if (!at_punct(p))
            unexpected("'" + std::string(p) + "'");
        return advance();
    }

    const Token& expect_keyword(std::string_view k) {
        if (!at_keyword(k))
            unexpected("'" + std::string(k) + "'");
        return advance();
    }

    const Token& expect_ident() {
        if (peek().kind != TokenKind::Identifier)
            unexpected("identifier");
        return advance();
    }

    // Closing delimiter for `open`; at end of file the opener is reported.
    void expect_close(const Token& open, std::string_view close) {
        if (at_punct(close)) {
            advance();
            return;
        }
        if (at_eof()) {
            diags_.push_back(Diagnostic::make("E0103", "unclosed '" + open.text + "'", open.span));
            throw ParseError{};
        }
        unexpected("'" + std::string(close) + "'");
    }

    // True at the closing delimiter; reports E0103 at end of file.
    bool at_close(const Token& open, std::string_view close) {
        if (at_punct(close))
            return true;
        if (at_eof()) {
            diags_.push_back(Diagnostic::make("E0103", "unclosed '" + open.text + "'", open.span));
            throw ParseError{};
        }
        return false;
    }

    // Skips to just past the next `;`, or to the next `}` (consumed only at
    // top level). Always advances at least one token.
    void synchronize(std::size_t error_start, bool consume_brace) {
        while (!at_eof()) {
            if (at_punct(";")) {
                advance();
                break;
            }
            if (at_punct("}")) {
                if (consume_brace || pos_ == error_start)
                    advance();
                break;
            }
            advance();
        }
        if (pos_ == error_start && !at_eof())
            advance();
    }

    // --------------------------------------------------------------- comments

    std::uint32_t prev_end() const { return pos_ == 0 ? 0 : tokens_[pos_ - 1].span.byte_end; }

    AttachedComments leading_comments() {
        AttachedComments out;
        std::uint32_t from = prev_end();
        std::uint32_t to = peek().span.byte_start;
        for (std::size_t i = 0; i < comments_.size(); ++i) {
            const Comment& c = comments_[i];
            if (consumed_[i] || c.span.byte_start < from || c.span.byte_start >= to)
                continue;
            if (out.leading.empty())
                out.blank_line_before = has_blank_line(from, c.span.byte_start);
            // An unclaimed same-line comment (e.g. after an opening brace)
            // moves onto its own line.
            out.leading.push_back(c);
            out.leading.back().trailing = false;
            consumed_[i] = true;
        }
        if (out.leading.empty())
            out.blank_line_before = has_blank_line(from, to);
        return out;
    }

    // Same-line comments right after the last consumed token.
    void trailing_comments(AttachedComments& into) {
        if (pos_ == 0)
            return;
        const Token& last = tokens_[pos_ - 1];
        std::uint32_t to = peek().span.byte_start;
        for (std::size_t i = 0; i < comments_.size(); ++i) {
            const Comment& c = comments_[i];
            if (consumed_[i] || !c.trailing || c.span.byte_start < last.span.byte_end || c.span.byte_start >= to ||
                c.span.line != last.span.line)
                continue;
            into.trailing.push_back(c);
            consumed_[i] = true;
        }
    }

    std::vector<Comment> dangling_before(std::size_t token_index) {
        std::vector<Comment> out;
        std::uint32_t to = tokens_[std::min(token_index, tokens_.size() - 1)].span.byte_start;
        std::uint32_t from = token_index == 0 ? 0 : tokens_[token_index - 1].span.byte_end;
        for (std::size_t i = 0; i < comments_.size(); ++i) {
            const Comment& c = comments_[i];
            if (consumed_[i] || c.span.byte_start < from || c.span.byte_start >= to)
                continue;
            out.push_back(c);
            consumed_[i] = true;
        }
        return out;
    }

    bool has_blank_line(std::uint32_t from, std::uint32_t to) const {
        if (pos_ == 0 || from >= to)
            return false;
        int newlines = 0;
        for (std::uint32_t i = from; i < to; ++i) {
            char c = text_[i];
            if (c == '\n') {
                if (++newlines >= 2)
                    return true;
            }
            else if (c != ' ' && c != '\t' && c != '\r') {
                newlines = 0;
            }
        }
        return false;
    }

    std::optional<DocComment> leading_doc(const Token& first) const {
        std::optional<DocComment> out;
        for (const DocComment& d : docs_) {
            if (d.trailing || !d.attached_to || d.attached_to->byte_start != first.span.byte_start)
                continue;
            if (out) {
                out->text += '\n';
                out->text += d.text;
            }
            else {
                out = d;
            }
        }
        return out;
    }

    std::optional<DocComment> trailing_doc() const {
        if (pos_ == 0)
            return std::nullopt;
        const Token& last = tokens_[pos_ - 1];
        for (const DocComment& d : docs_) {
            if (d.trailing && d.attached_to && d.attached_to->byte_start == last.span.byte_start)
                return d;
        }
        return std::nullopt;
    }

    // ------------------------------------------------------------------ items

    Item parse_item() {
        AttachedComments comments = leading_comments();
        const Token& first = peek();
        auto doc = leading_doc(first);
        bool is_pub = false;
        if (at_keyword("pub")) {
            advance();
            is_pub = true;
        }
        if (at_keyword("module")) {
            ModuleDecl m = parse_module();
            m.span = first.span;
            m.is_pub = is_pub;
            m.doc = std::move(doc);
            m.comments = std::move(comments);
            trailing_comments(m.comments);
            return m;
        }
        if (at_keyword("package")) {
            PackageDecl p = parse_package();
            p.span = first.span;
            p.is_pub = is_pub;
            p.doc = std::move(doc);
            p.comments = std::move(comments);
            trailing_comments(p.comments);
            return p;
        }
        unexpected(is_pub ? "'module' or 'package'" : "'module', 'package' or 'pub'");
    }

    ModuleDecl parse_module() {
        ModuleDecl m;
        expect_keyword("module");
        const Token& name = expect_ident();
        m.name = name.text;
        m.name_span = name.span;

        if (at_punct("::")) {
            advance();
            const Token& open = expect_punct("<");
            while (!at_close(open, ">")) {
                const Token& g = expect_ident();
                m.generic_params.push_back(GenericParam{g.text, g.span});
                if (!at_punct(">"))
                    expect_punct(",");
            }
            advance();
        }

        if (at_punct("#")) {
            advance();
            const Token& open = expect_punct("(");
            m.has_param_list = true;
            while (!at_close(open, ")"))
                m.params.push_back(parse_param());
            advance();
        }

        if (at_punct("(")) {
            const Token& open = advance();
            m.has_port_list = true;
            while (!at_close(open, ")"))
                m.ports.push_back(parse_port());
            advance();
        }

        const Token& open = expect_punct("{");
        while (!at_close(open, "}")) {
            std::size_t start = pos_;
            try {
                m.body.push_back(parse_module_item());
            }
            catch (const ParseError&) {
                synchronize(start, false);
            }
        }
        m.dangling = dangling_before(pos_);
        advance();
        return m;
    }

    ParamDecl parse_param() {
        ParamDecl p;
        p.comments = leading_comments();
        p.doc = leading_doc(peek());
        expect_keyword("param");
        const Token& name = expect_ident();
        p.name = name.text;
        p.name_span = name.span;
        expect_punct(":");
        p.type = parse_type();
        expect_punct("=");
        p.value = parse_expr();
        if (at_punct(","))
            advance();
        merge_trailing_doc(p.doc);
        trailing_comments(p.comments);
        return p;
    }

    PortDecl parse_port() {
        PortDecl p;
        p.comments = leading_comments();
        p.doc = leading_doc(peek());
        const Token& name = expect_ident();
        p.name = name.text;
        p.name_span = name.span;
        expect_punct(":");
        if (at_keyword("input"))
            p.direction = Direction::Input;
        else if (at_keyword("output"))
            p.direction = Direction::Output;
        else
            unexpected("'input' or 'output'");
        advance();
        if (peek().kind == TokenKind::DomainTick) {
            const Token& d = advance();
            p.domain = d.text.substr(1);
            p.domain_span = d.span;
        }
        p.type = parse_type();
        if (at_punct(","))
            advance();
        merge_trailing_doc(p.doc);
        trailing_comments(p.comments);
        return p;
    }

    void merge_trailing_doc(std::optional<DocComment>& doc) {
        auto trailing = trailing_doc();
        if (!trailing)
            return;
        if (doc) {
            doc->text += '\n';
            doc->text += trailing->text;
        }
        else {
            doc = std::move(trailing);
        }
    }

    TypeSpec parse_type() {
        TypeSpec t;
        const Token& tok = peek();
        auto kind = tok.kind == TokenKind::Keyword ? type_kind_from_keyword(tok.text) : std::nullopt;
        if (!kind)
            unexpected("type");
        advance();
        t.kind = *kind;
        t.span = tok.span;
        if (t.kind != TypeKind::Logic && t.kind != TypeKind::Bit)
            return t;

        if (at_punct("<")) {
            const Token& open = advance();
            bool saved = in_angle_;
            in_angle_ = true;
            while (!at_close(open, ">")) {
                t.packed_dims.push_back(parse_expr());
                if (!at_punct(">"))
                    expect_punct(",");
            }
            in_angle_ = saved;
            advance();
        }
        if (at_punct("[")) {
            const Token& open = advance();
            while (!at_close(open, "]")) {
                t.unpacked_dims.push_back(parse_expr());
                if (!at_punct("]"))
                    expect_punct(",");
            }
            advance();
        }
        return t;
    }

    PathName parse_path(Span& span) {
        const Token& first = expect_ident();
        PathName path{first.text};
        span = first.span;
        while (at_punct("::") && peek(1).kind == TokenKind::Identifier) {
            advance();
            const Token& seg = advance();
            path.push_back(seg.text);
            span.byte_end = seg.span.byte_end;
        }
        return path;
    }

    ModuleItem parse_module_item() {
        ModuleItem item;
        item.comments = leading_comments();
        item.span = peek().span;
        const Token& kw = peek();

        if (kw.is_keyword("var")) {
            advance();
            VarDecl v;
            const Token& name = expect_ident();
            v.name = name.text;
            v.name_span = name.span;
            expect_punct(":");
            if (peek().kind == TokenKind::DomainTick) {
                const Token& d = advance();
                v.domain = d.text.substr(1);
                v.domain_span = d.span;
            }
            v.type = parse_type();
            expect_punct(";");
            item.node = std::move(v);
        }
        else if (kw.is_keyword("const")) {
            item.node = parse_const();
        }
        else if (kw.is_keyword("inst")) {
            item.node = parse_inst();
        }
        else if (kw.is_keyword("assign")) {
            advance();
            AssignDecl a;
            a.target = parse_lvalue();
            expect_punct("=");
            a.value = parse_expr();
            expect_punct(";");
            item.node = std::move(a);
        }
        else if (kw.is_keyword("always_ff")) {
            advance();
            AlwaysFf a;
            if (at_punct("(")) {
                const Token& open = advance();
                while (!at_close(open, ")")) {
                    const Token& n = expect_ident();
                    a.sensitivity.push_back(SensitivityName{n.text, n.span});
                    if (!at_punct(")"))
                        expect_punct(",");
                }
                advance();
            }
            bool saved = in_always_ff_;
            in_always_ff_ = true;
            a.body = parse_block();
            in_always_ff_ = saved;
            item.node = std::move(a);
        }
        else if (kw.is_keyword("always_comb")) {
            advance();
            AlwaysComb a;
            a.body = parse_block();
            item.node = std::move(a);
        }
        else if (kw.is_keyword("unsafe")) {
            advance();
            expect_punct("(");
            expect_keyword("cdc");
            expect_punct(")");
            const Token& open = expect_punct("{");
            UnsafeCdc u;
            while (!at_close(open, "}")) {
                std::size_t start = pos_;
                try {
                    u.items.push_back(parse_module_item());
                }
                catch (const ParseError&) {
                    synchronize(start, false);
                }
            }
            u.dangling = dangling_before(pos_);
            advance();
            item.node = std::move(u);
        }
        else if (kw.is_keyword("function")) {
            item.node = parse_function();
        }
        else {
            unexpected("module item (var, const, inst, assign, always_ff, always_comb, unsafe, function)");
        }
        trailing_comments(item.comments);
        return item;
    }

    ConstDecl parse_const() {
        expect_keyword("const");
        ConstDecl c;
        const Token& name = expect_ident();
        c.name = name.text;
        c.name_span = name.span;
        expect_punct(":");
        c.type = parse_type();
        expect_punct("=");
        c.value = parse_expr();
        expect_punct(";");
        return c;
    }

    InstDecl parse_inst() {
        expect_keyword("inst");
        InstDecl inst;
        const Token& name = expect_ident();
        inst.name = name.text;
        inst.name_span = name.span;
        expect_punct(":");
        inst.target = parse_path(inst.target_span);
        if (at_punct("::") && peek(1).is_punct("<")) {
            advance();
            const Token& open = advance();
            while (!at_close(open, ">")) {
                GenericArg arg;
                arg.path = parse_path(arg.span);
                inst.generic_args.push_back(std::move(arg));
                if (!at_punct(">"))
                    expect_punct(",");
            }
            advance();
        }
        if (at_punct("#")) {
            advance();
            inst.has_param_list = true;
            inst.params = parse_connections();
        }
        if (at_punct("(")) {
            inst.has_port_list = true;
            inst.ports = parse_connections();
        }
        expect_punct(";");
        return inst;
    }

    std::vector<Connection> parse_connections() {
        std::vector<Connection> out;
        const Token& open = expect_punct("(");
        while (!at_close(open, ")")) {
            Connection c;
            c.comments = leading_comments();
            const Token& name = expect_ident();
            c.name = name.text;
            c.name_span = name.span;
            expect_punct(":");
            c.value = parse_expr();
            if (!at_punct(")"))
                expect_punct(",");
            trailing_comments(c.comments);
            out.push_back(std::move(c));
        }
        advance();
        return out;
    }

    FunctionDecl parse_function() {
        expect_keyword("function");
        FunctionDecl f;
        const Token& name = expect_ident();
        f.name = name.text;
        f.name_span = name.span;
        const Token& open = expect_punct("(");
        while (!at_close(open, ")")) {
            FunctionArg arg;
            const Token& an = expect_ident();
            arg.name = an.text;
            arg.name_span = an.span;
            expect_punct(":");
            arg.type = parse_type();
            f.args.push_back(std::move(arg));
            if (!at_punct(")"))
                expect_punct(",");
        }
        advance();
        expect_punct("->");
        f.return_type = parse_type();
        bool saved = in_always_ff_;
        in_always_ff_ = false;
        f.body = parse_block();
        in_always_ff_ = saved;
        return f;
    }

    PackageDecl parse_package() {
        expect_keyword("package");
        PackageDecl p;
        const Token& name = expect_ident();
        p.name = name.text;
        p.name_span = name.span;
        const Token& open = expect_punct("{");
        while (!at_close(open, "}")) {
            std::size_t start = pos_;
            try {
                PackageItem item;
                item.comments = leading_comments();
                item.span = peek().span;
                if (at_keyword("const"))
                    item.node = parse_const();
                else if (at_keyword("function"))
                    item.node = parse_function();
                else
                    unexpected("'const' or 'function'");
                trailing_comments(item.comments);
                p.items.push_back(std::move(item));
            }
            catch (const ParseError&) {
                synchronize(start, false);
            }
        }
        p.dangling = dangling_before(pos_);
        advance();
        return p;
    }

    // ------------------------------------------------------------- statements

    Block parse_block() {
        Block b;
        const Token& open = expect_punct("{");
        b.open = open.span;
        while (!at_close(open, "}")) {
            std::size_t start = pos_;
            try {
                b.stmts.push_back(parse_stmt());
            }
            catch (const ParseError&) {
                synchronize(start, false);
            }
        }
        b.dangling = dangling_before(pos_);
        advance();
        return b;
    }

    Stmt parse_stmt() {
        Stmt s;
        s.comments = leading_comments();
        s.span = peek().span;
        if (at_keyword("if") || at_keyword("if_reset")) {
            s.node = parse_if();
        }
        else if (at_keyword("return")) {
            advance();
            ReturnStmt r{parse_expr()};
            expect_punct(";");
            s.node = std::move(r);
        }
        else if (at_punct("{")) {
            s.node = parse_block();
        }
        else if (peek().kind == TokenKind::Identifier) {
            AssignStmt a;
            a.target = parse_lvalue();
            const Token& op = peek();
            if (op.kind != TokenKind::Punct ||
                std::find(kAssignOps.begin(), kAssignOps.end(), op.text) == kAssignOps.end())
                unexpected("assignment operator");
            a.op = advance().text;
            a.value = parse_expr();
            expect_punct(";");
            s.node = std::move(a);
        }
        else {
            unexpected("statement");
        }
        trailing_comments(s.comments);
        return s;
    }

    IfStmt parse_if() {
        IfStmt i;
        const Token& kw = advance();
        i.keyword = kw.span;
        if (kw.is_keyword("if_reset")) {
            i.is_reset = true;
            if (!in_always_ff_)
                diags_.push_back(Diagnostic::make("E0102", "'if_reset' is only allowed inside always_ff", kw.span));
        }
        else {
            i.condition = parse_expr();
        }
        i.then_block = parse_block();
        if (at_keyword("else")) {
            advance();
            if (at_keyword("if")) {
                Stmt nested;
                nested.span = peek().span;
                nested.node = parse_if();
                i.else_clause.push_back(ElseClause{std::move(nested)});
            }
            else {
                i.else_clause.push_back(ElseClause{parse_block()});
            }
        }
        return i;
    }

    Expr parse_lvalue() {
        Span span;
        PathName path = parse_path(span);
        return parse_selects(Expr::make_path(std::move(path), span));
    }

    // ------------------------------------------------------------ expressions

    Expr parse_expr(int min_precedence = 1) {
        Expr lhs = parse_unary();
        while (true) {
            const Token& op = peek();
            if (op.kind != TokenKind::Punct)
                break;
            if (in_angle_ && (op.text == ">" || op.text == ">=" || op.text == ">>"))
                break;
            int prec = binary_precedence(op.text);
            if (prec == 0 || prec < min_precedence)
                break;
            std::string text = advance().text;
            Expr rhs = parse_expr(prec + 1);
            Expr bin = Expr::make_binary(std::move(text), std::move(lhs), std::move(rhs));
            bin.span.byte_end = bin.operands.back().span.byte_end;
            lhs = std::move(bin);
        }
        return lhs;
    }

    Expr parse_unary() {
        const Token& t = peek();
        if (t.is_punct("!") || t.is_punct("~") || t.is_punct("-")) {
            advance();
            Expr e;
            e.kind = ExprKind::Unary;
            e.text = t.text;
            e.span = t.span;
            e.operands.push_back(parse_unary());
            e.span.byte_end = e.operands.back().span.byte_end;
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        if (t.kind == TokenKind::SizedLiteral || t.kind == TokenKind::DecimalLiteral) {
            advance();
            Expr e;
            e.kind = t.kind == TokenKind::SizedLiteral ? ExprKind::SizedLiteral : ExprKind::DecimalLiteral;
            e.text = t.text;
            e.span = t.span;
            return e;
        }
        if (t.is_punct("(")) {
            const Token& open = advance();
            bool saved = in_angle_;
            in_angle_ = false;
            Expr inner = parse_expr();
            in_angle_ = saved;
            Span close = peek().span;
            expect_close(open, ")");
            Expr e;
            e.kind = ExprKind::Paren;
            e.span = Span{open.span.file, open.span.byte_start, close.byte_end, open.span.line, open.span.column};
            e.operands.push_back(std::move(inner));
            return e;
        }
        if (t.kind == TokenKind::Identifier) {
            Span span;
            PathName path = parse_path(span);
            if (at_punct("(")) {
                const Token& open = advance();
                Expr call;
                call.kind = ExprKind::Call;
                call.path = std::move(path);
                bool saved = in_angle_;
                in_angle_ = false;
                while (!at_close(open, ")")) {
                    call.operands.push_back(parse_expr());
                    if (!at_punct(")"))
                        expect_punct(",");
                }
                in_angle_ = saved;
                span.byte_end = peek().span.byte_end;
                advance();
                call.span = span;
                return call;
            }
            return parse_selects(Expr::make_path(std::move(path), span));
        }
        unexpected("expression");
    }

    Expr parse_selects(Expr base) {
        while (at_punct("[")) {
            const Token& open = advance();
            bool saved = in_angle_;
            in_angle_ = false;
            Expr first = parse_expr();
            Expr sel;
            sel.span = base.span;
            sel.operands.push_back(std::move(base));
            sel.operands.push_back(std::move(first));
            if (at_punct(":")) {
                advance();
                sel.kind = ExprKind::PartSelect;
                sel.operands.push_back(parse_expr());
            }
            else {
                sel.kind = ExprKind::BitSelect;
            }
            in_angle_ = saved;
            sel.span.byte_end = peek().span.byte_end;
            expect_close(open, "]");
            base = std::move(sel);
        }
        return base;
    }

    std::string_view text_;
    const std::vector<Token>& tokens_;
    const std::vector<Comment>& comments_;
    std::vector<bool> consumed_;
    std::vector<DocComment> docs_;
    std::size_t pos_ = 0;
    bool in_angle_ = false;
    bool in_always_ff_ = false;
    SourceFile file_;
    Diagnostics diags_;
};

}  // namespace

int binary_precedence(std::string_view op) {
    for (const BinaryOp& b : kBinaryOps)
        if (!b.op.empty() && b.op == op)
            return b.precedence;
    return 0;
}

ParseResult parse(const SourceManager& sources, const LexResult& lexed, FileId file) {
    return Parser(sources, lexed, file).parse_source();
}

ParseResult parse_file(const SourceManager& sources, FileId file) {
    LexResult lexed = tokenize(sources, file);
    ParseResult result = parse(sources, lexed, file);
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

ExprParseResult parse_expression(const SourceManager& sources, FileId file) {
    LexResult lexed = tokenize(sources, file);
    ExprParseResult result = Parser(sources, lexed, file).parse_single_expression();
    result.diagnostics.insert(result.diagnostics.begin(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    return result;
}

}  // namespace vl
