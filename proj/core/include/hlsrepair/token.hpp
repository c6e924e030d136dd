#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hlsrepair::cfront {

/// Half-open byte range into the source buffer, with the 1-based line and
/// column of its first byte.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line = 0;
    uint32_t column = 0;

    bool contains(const Span& other) const {
        return begin <= other.begin && other.end <= end;
    }
    bool overlaps(const Span& other) const {
        return begin < other.end && other.begin < end;
    }
};

enum class TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    Punct,
    Comment,
    PragmaLine,   // a whole `#pragma ...` line
    HashLine,     // any other full `#...` directive line (include, define, ...)
    Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;     // exact source bytes of the token
    std::string leading;  // whitespace run preceding the token
    Span span;            // covers text only, not leading whitespace

    bool is(TokenKind k) const { return kind == k; }
    bool is_punct(std::string_view p) const {
        return kind == TokenKind::Punct && text == p;
    }
    bool is_keyword(std::string_view k) const {
        return kind == TokenKind::Keyword && text == k;
    }
};

struct TokenStream {
    std::vector<Token> tokens;  // terminated by an Eof token
    std::string trailing;       // whitespace after the last real token

    /// Concatenates leading whitespace + token texts + trailing whitespace.
    /// By construction this reproduces the input byte-exactly.
    std::string reconstruct() const;
};

struct LexError {
    std::string message;
    Span span;
};

using LexResult = std::variant<TokenStream, LexError>;

/// Tokenizes a source buffer. Non-UTF-8 bytes are accepted as Latin-1;
/// spans are byte offsets either way.
LexResult lex(std::string_view bytes);

bool is_type_keyword(std::string_view word);
bool is_keyword_word(std::string_view word);

}  // namespace hlsrepair::cfront
