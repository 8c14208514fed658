#include "sv_reader.hpp"

#include <cctype>
#include <stdexcept>

namespace vl::support {

namespace {

struct Tok {
    std::string text;
    bool ident = false;
};

std::vector<Tok> lex(const std::string& s) {
    static const char* multi[] = {"<<=", ">>=", "<=", ">=", "==", "!=", "&&", "||", "<<", ">>", "::", "+=", "-="};
    std::vector<Tok> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        }
        else if (s.compare(i, 2, "//") == 0) {
            while (i < s.size() && s[i] != '\n')
                ++i;
        }
        else if (s.compare(i, 2, "/*") == 0) {
            std::size_t end = s.find("*/", i + 2);
            i = end == std::string::npos ? s.size() : end + 2;
        }
        else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '$'))
                ++j;
            out.push_back({s.substr(i, j - i), true});
            i = j;
        }
        else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            out.push_back({s.substr(i, j - i), false});
            i = j;
        }
        else {
            std::string op(1, c);
            for (const char* m : multi) {
                if (s.compare(i, std::char_traits<char>::length(m), m) == 0) {
                    op = m;
                    break;
                }
            }
            out.push_back({op, false});
            i += op.size();
        }
    }
    return out;
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Reader {
public:
    explicit Reader(std::vector<Tok> toks) : t_(std::move(toks)) {}

    std::vector<SvModule> file() {
        std::vector<SvModule> mods;
        while (!at_end())
            mods.push_back(module());
        return mods;
    }

private:
    bool at_end() const { return i_ >= t_.size(); }
    const std::string& peek(std::size_t k = 0) const {
        static const std::string eof = "<eof>";
        return i_ + k < t_.size() ? t_[i_ + k].text : eof;
    }
    bool accept(const std::string& s) {
        if (peek() != s)
            return false;
        ++i_;
        return true;
    }
    void expect(const std::string& s) {
        if (!accept(s))
            throw Failure("expected '" + s + "' but found '" + peek() + "'");
    }
    std::string ident() {
        if (at_end() || !t_[i_].ident)
            throw Failure("expected identifier but found '" + peek() + "'");
        return t_[i_++].text;
    }

    static SvNode leaf(std::string s) { return SvNode{std::move(s), {}}; }

    SvModule module() {
        expect("module");
        SvModule m;
        m.name = ident();
        SvNode params{"params", {}};
        SvNode ports{"ports", {}};
        if (accept("#")) {
            expect("(");
            while (!accept(")")) {
                expect("parameter");
                // Type words are not part of the structure.
                while (t_[i_].ident && peek(1) != "=")
                    ++i_;
                std::string name = ident();
                expect("=");
                params.kids.push_back(SvNode{"param", {leaf(name), expr()}});
                accept(",");
            }
        }
        if (accept("(")) {
            while (!accept(")")) {
                std::string dir = ident();
                accept("logic");
                accept("wire");
                SvNode p{dir, {}};
                p.kids.push_back(dims());
                p.kids.push_back(leaf(ident()));
                ports.kids.push_back(std::move(p));
                accept(",");
            }
        }
        expect(";");
        SvNode body{"body", {}};
        while (!accept("endmodule"))
            body.kids.push_back(item());
        m.tree = SvNode{"module", {leaf(m.name), params, ports, body}};
        return m;
    }

    SvNode dims() {
        SvNode d{"dims", {}};
        while (peek() == "[") {
            ++i_;
            SvNode hi = expr();
            expect(":");
            SvNode lo = expr();
            expect("]");
            d.kids.push_back(SvNode{"range", {hi, lo}});
        }
        return d;
    }

    SvNode item() {
        if (accept("logic")) {
            SvNode packed = dims();
            std::string name = ident();
            SvNode unpacked = dims();
            expect(";");
            return SvNode{"var", {leaf(name), packed, unpacked}};
        }
        if (accept("localparam")) {
            while (t_[i_].ident && peek(1) != "=")
                ++i_;
            std::string name = ident();
            expect("=");
            SvNode v = expr();
            expect(";");
            return SvNode{"localparam", {leaf(name), v}};
        }
        if (accept("always_ff")) {
            expect("@");
            expect("(");
            SvNode sens{"sens", {}};
            do {
                std::string edge = ident();
                sens.kids.push_back(SvNode{edge, {leaf(ident())}});
            } while (accept("or"));
            expect(")");
            return SvNode{"always_ff", {sens, stmt()}};
        }
        if (accept("function")) {
            std::string name;
            // Return type words and dims precede the name.
            while (!at_end() && peek() != "(")
                name = t_[i_++].text;
            expect("(");
            SvNode args{"args", {}};
            while (!accept(")")) {
                expect("input");
                accept("logic");
                while (t_[i_].ident && peek(1) != "," && peek(1) != ")")
                    ++i_;
                SvNode d = dims();
                args.kids.push_back(SvNode{"arg", {leaf(ident()), d}});
                accept(",");
            }
            expect(";");
            SvNode body{"block", {}};
            while (!accept("endfunction"))
                body.kids.push_back(stmt());
            return SvNode{"function", {leaf(name), args, body}};
        }
        if (accept("always_comb"))
            return SvNode{"always_comb", {stmt()}};
        if (accept("assign")) {
            SvNode lhs = expr();
            expect("=");
            SvNode rhs = expr();
            expect(";");
            return SvNode{"assign", {lhs, rhs}};
        }
        // Instance: Type [#(...)] name (...);
        std::string type = ident();
        SvNode params{"params", {}};
        if (accept("#")) {
            expect("(");
            params = connections();
        }
        std::string name = ident();
        expect("(");
        SvNode ports = connections();
        expect(";");
        return SvNode{"inst", {leaf(type), leaf(name), params, ports}};
    }

    SvNode connections() {
        SvNode list{"conns", {}};
        while (!accept(")")) {
            expect(".");
            std::string name = ident();
            expect("(");
            SvNode v = peek() == ")" ? leaf("") : expr();
            expect(")");
            list.kids.push_back(SvNode{"conn", {leaf(name), v}});
            accept(",");
        }
        return list;
    }

    SvNode stmt() {
        if (accept("begin")) {
            SvNode b{"block", {}};
            while (!accept("end"))
                b.kids.push_back(stmt());
            return b;
        }
        if (accept("if")) {
            expect("(");
            SvNode cond = expr();
            expect(")");
            SvNode s{"if", {cond, stmt()}};
            if (accept("else"))
                s.kids.push_back(stmt());
            return s;
        }
        if (accept("return")) {
            SvNode v = expr();
            expect(";");
            return SvNode{"return", {v}};
        }
        SvNode lhs = expr(100);
        std::string op = peek();
        if (op != "<=" && op != "=")
            throw Failure("expected assignment but found '" + op + "'");
        ++i_;
        SvNode rhs = expr();
        expect(";");
        return SvNode{op == "<=" ? "nonblocking" : "blocking", {lhs, rhs}};
    }

    static int prec(const std::string& op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "|") return 3;
        if (op == "^") return 4;
        if (op == "&") return 5;
        if (op == "==" || op == "!=") return 6;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
        if (op == "<<" || op == ">>") return 8;
        if (op == "+" || op == "-") return 9;
        if (op == "*" || op == "/" || op == "%") return 10;
        return 0;
    }

    // `min` above every binary level stops before `<=` in statement context.
    SvNode expr(int min = 1) {
        SvNode lhs = unary();
        while (true) {
            int p = prec(peek());
            if (p == 0 || p < min || min > 10)
                return lhs;
            std::string op = peek();
            ++i_;
            SvNode rhs = expr(p + 1);
            lhs = SvNode{op, {lhs, rhs}};
        }
    }

    SvNode unary() {
        for (const char* op : {"!", "~", "-"}) {
            if (accept(op))
                return SvNode{std::string("u") + op, {unary()}};
        }
        return postfix(primary());
    }

    SvNode primary() {
        if (accept("(")) {
            SvNode e = expr();
            expect(")");
            return e;
        }
        if (at_end())
            throw Failure("unexpected end of input");
        if (!t_[i_].ident) {
            const std::string& s = t_[i_++].text;
            if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '\''))
                throw Failure("unexpected '" + s + "'");
            return leaf(s);
        }
        std::string name = ident();
        while (accept("::"))
            name += "::" + ident();
        if (accept("(")) {
            SvNode call{"call", {leaf(name)}};
            while (!accept(")")) {
                call.kids.push_back(expr());
                accept(",");
            }
            return call;
        }
        return leaf(name);
    }

    SvNode postfix(SvNode base) {
        while (accept("[")) {
            SvNode a = expr();
            if (accept(":")) {
                SvNode b = expr();
                expect("]");
                base = SvNode{"part", {base, a, b}};
            }
            else {
                expect("]");
                base = SvNode{"select", {base, a}};
            }
        }
        return base;
    }

    std::vector<Tok> t_;
    std::size_t i_ = 0;
};

void dump_into(const SvNode& n, std::string& out) {
    if (n.kids.empty()) {
        out += n.head;
        return;
    }
    out += "(" + n.head;
    for (const SvNode& k : n.kids) {
        out += ' ';
        dump_into(k, out);
    }
    out += ')';
}

void collect(const SvNode& n, const std::string& head, std::vector<const SvNode*>& out) {
    if (n.head == head)
        out.push_back(&n);
    for (const SvNode& k : n.kids)
        collect(k, head, out);
}

}  // namespace

std::string SvNode::dump() const {
    std::string out;
    dump_into(*this, out);
    return out;
}

const SvModule* SvParse::find(const std::string& name) const {
    for (const SvModule& m : modules) {
        if (m.name == name)
            return &m;
    }
    return nullptr;
}

SvParse read_sv(const std::string& text) {
    SvParse result;
    try {
        result.modules = Reader(lex(text)).file();
    }
    catch (const Failure& f) {
        result.error = f.what();
    }
    return result;
}

SvNode rename(const SvNode& node, const std::map<std::string, std::string>& names) {
    SvNode out{node.head, {}};
    if (node.kids.empty()) {
        if (auto it = names.find(node.head); it != names.end())
            out.head = it->second;
        return out;
    }
    for (const SvNode& k : node.kids)
        out.kids.push_back(rename(k, names));
    return out;
}

std::vector<const SvNode*> find_all(const SvNode& node, const std::string& head) {
    std::vector<const SvNode*> out;
    collect(node, head, out);
    return out;
}

}  // namespace vl::support
