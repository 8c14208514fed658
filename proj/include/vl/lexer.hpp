#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vl/diagnostic.hpp"
#include "vl/source.hpp"

namespace vl {

enum class TokenKind {
    Keyword,
    Identifier,
    SizedLiteral,    // 8'hff
    DecimalLiteral,  // 42, 1_000
    Punct,
    DomainTick,      // `a
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;
    Span span;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
};

enum class TriviaKind { Whitespace, LineComment, DocComment, Skipped };

struct Trivia {
    TriviaKind kind;
    std::string text;
    Span span;
};

// A `//` or `///` comment line. `trailing` is set when a token precedes the
// comment on the same line.
struct Comment {
    std::string text;  // verbatim, including the slashes
    Span span;
    bool doc = false;
    bool trailing = false;
    bool blank_line_before = false;  // an empty line separates it from earlier text
};

// One or more consecutive `///` lines (or a single trailing `///`), with the
// marker and one following space stripped from each line.
struct DocComment {
    std::string text;
    Span span;
    bool trailing = false;
    std::optional<Span> attached_to;
};

struct LexResult {
    std::vector<Token> tokens;  // always ends with an EndOfFile token
    std::vector<Trivia> trivia;
    std::vector<Comment> comments;
    std::vector<DocComment> docs;
    Diagnostics diagnostics;
};

bool is_keyword(std::string_view word);
bool is_identifier(std::string_view word);

// Valid digit characters (excluding `_`) for a sized-literal base letter.
bool is_base_digit(char base, char c);

LexResult tokenize(const SourceManager& sources, FileId file);

// Leading doc blocks attach to the next token; trailing ones to the last
// token on the same line before them.
void attach_doc_comments(const std::vector<Token>& tokens, std::vector<DocComment>& docs);

}  // namespace vl
