#include "vl/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace vl {

namespace {

constexpr std::array kKeywords = {
    "module",          "package",         "param",           "const",          "var",
    "inst",            "input",           "output",          "always_ff",      "always_comb",
    "assign",          "if",              "else",            "if_reset",       "unsafe",
    "cdc",             "function",        "return",          "pub",            "clock",
    "clock_posedge",   "clock_negedge",   "reset",           "reset_async_high",
    "reset_async_low", "reset_sync_high", "reset_sync_low",  "logic",          "bit",
    "u32",             "u64",
};

// Longest first so that a linear scan yields the maximal munch.
constexpr std::array kPuncts = {
    "<<=", ">>=", "::", "->", "<=", ">=", "==", "!=", "<<", ">>", "&&", "||", "+=", "-=",
    "*=",  "&=",  "|=", "^=", ":",  ";",  ",",  "(",  ")",  "{",  "}",  "[",  "]",  "<",
    ">",   "=",   "+",  "-",  "*",  "/",  "%",  "&",  "|",  "^",  "!",  "~",  "#",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(const SourceManager& sources, FileId file)
        : sources_(sources), file_(file), text_(sources.text(file)) {}

    LexResult run() {
        while (pos_ < text_.size())
            step();
        result_.tokens.push_back(Token{TokenKind::EndOfFile, "", span(pos_, pos_)});
        collect_docs();
        return std::move(result_);
    }

private:
    Span span(std::size_t start, std::size_t end) const {
        return sources_.make_span(file_, static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(end));
    }

    void push_token(TokenKind kind, std::size_t start) {
        result_.tokens.push_back(Token{kind, std::string(text_.substr(start, pos_ - start)), span(start, pos_)});
        last_token_line_ = result_.tokens.back().span.line;
        last_content_line_ = last_token_line_;
    }

    void push_trivia(TriviaKind kind, std::size_t start) {
        result_.trivia.push_back(Trivia{kind, std::string(text_.substr(start, pos_ - start)), span(start, pos_)});
    }

    void error(std::string code, std::string message, std::size_t start, std::size_t end) {
        result_.diagnostics.push_back(Diagnostic::make(std::move(code), std::move(message), span(start, end)));
    }

    void step() {
        std::size_t start = pos_;
        char c = text_[pos_];

        if (std::isspace(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            push_trivia(TriviaKind::Whitespace, start);
            return;
        }

        if (text_.substr(pos_, 2) == "//") {
            lex_comment(start);
            return;
        }

        if (ident_start(c)) {
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                ++pos_;
            auto word = text_.substr(start, pos_ - start);
            push_token(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, start);
            return;
        }

        if (is_digit(c)) {
            lex_number(start);
            return;
        }

        if (c == '`') {
            ++pos_;
            if (pos_ < text_.size() && ident_start(text_[pos_])) {
                while (pos_ < text_.size() && ident_char(text_[pos_]))
                    ++pos_;
                push_token(TokenKind::DomainTick, start);
            }
            else {
                error("E0001", "expected a clock domain name after '`'", start, pos_);
                push_trivia(TriviaKind::Skipped, start);
            }
            return;
        }

        for (std::string_view punct : kPuncts) {
            if (text_.substr(pos_, punct.size()) == punct) {
                pos_ += punct.size();
                push_token(TokenKind::Punct, start);
                return;
            }
        }

        // Skip one whole UTF-8 sequence so the diagnostic covers the character.
        ++pos_;
        while (pos_ < text_.size() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80)
            ++pos_;
        error("E0001", "invalid character '" + std::string(text_.substr(start, pos_ - start)) + "'", start, pos_);
        push_trivia(TriviaKind::Skipped, start);
    }

    void lex_comment(std::size_t start) {
        while (pos_ < text_.size() && text_[pos_] != '\n')
            ++pos_;
        std::size_t end = pos_;
        while (end > start && text_[end - 1] == '\r')
            --end;
        auto body = text_.substr(start, end - start);
        bool doc = body.substr(0, 3) == "///" && body.substr(0, 4) != "////";

        Span sp = span(start, end);
        bool trailing = !result_.tokens.empty() && last_token_line_ == sp.line;
        bool blank = last_content_line_ != 0 && sp.line > last_content_line_ + 1;
        result_.comments.push_back(Comment{std::string(body), sp, doc, trailing, blank});
        last_content_line_ = sp.line;

        // Any '\r' before the newline stays with the comment as trivia.
        push_trivia(doc ? TriviaKind::DocComment : TriviaKind::LineComment, start);
    }

    void lex_number(std::size_t start) {
        while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != '\'') {
            push_token(TokenKind::DecimalLiteral, start);
            return;
        }

        ++pos_;  // '
        char base = pos_ < text_.size() ? text_[pos_] : '\0';
        if (std::string_view("bBdDhH").find(base) == std::string_view::npos || base == '\0') {
            error("E0002", "sized literal is missing a base specifier (b, d or h)", start, pos_);
            push_token(TokenKind::SizedLiteral, start);
            return;
        }
        ++pos_;
        std::size_t digits_start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_]))
            ++pos_;

        auto digits = text_.substr(digits_start, pos_ - digits_start);
        bool any_digit = false;
        std::optional<char> bad;
        for (char d : digits) {
            if (d == '_')
                continue;
            if (is_base_digit(base, d))
                any_digit = true;
            else if (!bad)
                bad = d;
        }
        if (bad) {
            error("E0002", std::string("invalid digit '") + *bad + "' in sized literal with base '" + base + "'",
                  start, pos_);
        }
        else if (!any_digit) {
            error("E0002", "sized literal has no digits", start, pos_);
        }
        push_token(TokenKind::SizedLiteral, start);
    }

    void collect_docs() {
        auto& out = result_.docs;
        const Comment* prev = nullptr;
        for (const Comment& c : result_.comments) {
            if (!c.doc) {
                prev = nullptr;
                continue;
            }
            std::string_view line = std::string_view(c.text).substr(3);
            if (!line.empty() && line.front() == ' ')
                line.remove_prefix(1);

            bool continues = prev && !c.trailing && !prev->trailing && c.span.line == prev->span.line + 1 &&
                             only_whitespace_between(*prev, c);
            if (continues) {
                DocComment& block = out.back();
                block.text += '\n';
                block.text += line;
                block.span = span(block.span.byte_start, c.span.byte_end);
            }
            else {
                out.push_back(DocComment{std::string(line), c.span, c.trailing, std::nullopt});
            }
            prev = &c;
        }
    }

    bool only_whitespace_between(const Comment& a, const Comment& b) const {
        auto gap = text_.substr(a.span.byte_end, b.span.byte_start - a.span.byte_end);
        return std::all_of(gap.begin(), gap.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
    }

    const SourceManager& sources_;
    FileId file_;
    std::string_view text_;
    std::size_t pos_ = 0;
    std::uint32_t last_token_line_ = 0;
    std::uint32_t last_content_line_ = 0;
    LexResult result_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_identifier(std::string_view word) {
    if (word.empty() || !ident_start(word.front()))
        return false;
    return std::all_of(word.begin(), word.end(), ident_char) && !is_keyword(word);
}

bool is_base_digit(char base, char c) {
    switch (std::tolower(static_cast<unsigned char>(base))) {
        case 'b': return c == '0' || c == '1';
        case 'd': return is_digit(c);
        case 'h': return std::isxdigit(static_cast<unsigned char>(c)) != 0;
        default: return false;
    }
}

LexResult tokenize(const SourceManager& sources, FileId file) {
    LexResult result = Lexer(sources, file).run();
    attach_doc_comments(result.tokens, result.docs);
    return result;
}

void attach_doc_comments(const std::vector<Token>& tokens, std::vector<DocComment>& docs) {
    for (DocComment& doc : docs) {
        auto next = std::lower_bound(tokens.begin(), tokens.end(), doc.span.byte_end,
                                     [](const Token& t, std::uint32_t pos) { return t.span.byte_start < pos; });
        if (doc.trailing) {
            if (next != tokens.begin())
                doc.attached_to = std::prev(next)->span;
        }
        else if (next != tokens.end() && next->kind != TokenKind::EndOfFile) {
            doc.attached_to = next->span;
        }
    }
}

}  // namespace vl
