#include "hlsrepair/token.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace hlsrepair::cfront {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "int",      "unsigned", "signed",   "char",    "short",   "long",
    "float",    "double",   "void",     "bool",    "true",    "false",
    "if",       "else",     "while",    "for",     "do",      "return",
    "break",    "continue", "switch",   "case",    "default", "struct",
    "const",    "static",   "sizeof",   "enum",    "typedef", "goto",
    // C++ words kept as keywords so incompatibility checks can see them
    // even though the parser does not model the constructs.
    "virtual",  "class",    "template", "typename", "new",    "delete",
    "operator", "public",   "private",  "protected",
};

const std::unordered_set<std::string_view> kTypeKeywords = {
    "int",  "unsigned", "signed", "char", "short", "long",
    "float", "double",  "void",   "bool", "const", "static",
};

// Longest-match punctuation table, longest first.
const std::array<std::string_view, 47> kPuncts = {
    "<<=", ">>=", "...",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^", "~",
    "?", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
};

struct Cursor {
    std::string_view src;
    size_t pos = 0;
    uint32_t line = 1;
    uint32_t col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(size_t off = 0) const {
        return pos + off < src.size() ? src[pos + off] : '\0';
    }
    void advance() {
        if (src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
};

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string TokenStream::reconstruct() const {
    std::string out;
    for (const Token& t : tokens) {
        out += t.leading;
        out += t.text;
    }
    out += trailing;
    return out;
}

bool is_type_keyword(std::string_view word) { return kTypeKeywords.count(word) > 0; }
bool is_keyword_word(std::string_view word) { return kKeywords.count(word) > 0; }

LexResult lex(std::string_view bytes) {
    TokenStream ts;
    Cursor cur{bytes};

    std::string pending_ws;
    while (true) {
        // Consume whitespace into the next token's leading run.
        while (!cur.done() && std::isspace(static_cast<unsigned char>(cur.peek()))) {
            pending_ws += cur.peek();
            cur.advance();
        }
        if (cur.done()) break;

        Token tok;
        tok.leading = std::move(pending_ws);
        pending_ws.clear();
        tok.span.begin = static_cast<uint32_t>(cur.pos);
        tok.span.line = cur.line;
        tok.span.column = cur.col;

        const char c = cur.peek();
        const size_t start = cur.pos;

        auto finish = [&](TokenKind kind) {
            tok.kind = kind;
            tok.span.end = static_cast<uint32_t>(cur.pos);
            tok.text = std::string(bytes.substr(start, cur.pos - start));
            ts.tokens.push_back(std::move(tok));
        };

        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            finish(TokenKind::Comment);
            continue;
        }
        if (c == '/' && cur.peek(1) == '*') {
            cur.advance();
            cur.advance();
            bool closed = false;
            while (!cur.done()) {
                if (cur.peek() == '*' && cur.peek(1) == '/') {
                    cur.advance();
                    cur.advance();
                    closed = true;
                    break;
                }
                cur.advance();
            }
            if (!closed) {
                return LexError{
                    "unterminated block comment",
                    Span{tok.span.begin, static_cast<uint32_t>(cur.pos), tok.span.line,
                         tok.span.column}};
            }
            finish(TokenKind::Comment);
            continue;
        }
        if (c == '#') {
            // Whole-line directive; a trailing backslash continues the line.
            while (!cur.done() && cur.peek() != '\n') {
                if (cur.peek() == '\\' && cur.peek(1) == '\n') {
                    cur.advance();
                    cur.advance();
                    continue;
                }
                cur.advance();
            }
            std::string_view text = bytes.substr(start, cur.pos - start);
            size_t word = text.find_first_not_of("# \t");
            bool pragma = word != std::string_view::npos &&
                          text.substr(word).rfind("pragma", 0) == 0;
            finish(pragma ? TokenKind::PragmaLine : TokenKind::HashLine);
            continue;
        }
        if (c == '"' || c == '\'') {
            const char quote = c;
            cur.advance();
            bool closed = false;
            while (!cur.done()) {
                if (cur.peek() == '\\' && cur.pos + 1 < bytes.size()) {
                    cur.advance();
                    cur.advance();
                    continue;
                }
                if (cur.peek() == quote) {
                    cur.advance();
                    closed = true;
                    break;
                }
                if (cur.peek() == '\n') break;
                cur.advance();
            }
            if (!closed) {
                return LexError{
                    quote == '"' ? "unterminated string literal"
                                 : "unterminated character literal",
                    Span{tok.span.begin, static_cast<uint32_t>(cur.pos), tok.span.line,
                         tok.span.column}};
            }
            finish(quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(cur.peek(1))))) {
            bool is_float = false;
            if (c == '0' && (cur.peek(1) == 'x' || cur.peek(1) == 'X')) {
                cur.advance();
                cur.advance();
                while (std::isxdigit(static_cast<unsigned char>(cur.peek()))) cur.advance();
            } else {
                while (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.advance();
                if (cur.peek() == '.') {
                    is_float = true;
                    cur.advance();
                    while (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.advance();
                }
                if (cur.peek() == 'e' || cur.peek() == 'E') {
                    char nxt = cur.peek(1);
                    if (std::isdigit(static_cast<unsigned char>(nxt)) ||
                        ((nxt == '+' || nxt == '-') &&
                         std::isdigit(static_cast<unsigned char>(cur.peek(2))))) {
                        is_float = true;
                        cur.advance();
                        if (cur.peek() == '+' || cur.peek() == '-') cur.advance();
                        while (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.advance();
                    }
                }
            }
            while (cur.peek() == 'u' || cur.peek() == 'U' || cur.peek() == 'l' ||
                   cur.peek() == 'L' || (is_float && (cur.peek() == 'f' || cur.peek() == 'F'))) {
                cur.advance();
            }
            finish(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral);
            continue;
        }
        if (is_ident_start(c)) {
            while (is_ident_char(cur.peek())) cur.advance();
            std::string_view word = bytes.substr(start, cur.pos - start);
            finish(kKeywords.count(word) ? TokenKind::Keyword : TokenKind::Identifier);
            continue;
        }

        bool matched = false;
        for (std::string_view p : kPuncts) {
            if (bytes.substr(cur.pos, p.size()) == p) {
                for (size_t i = 0; i < p.size(); ++i) cur.advance();
                finish(TokenKind::Punct);
                matched = true;
                break;
            }
        }
        if (matched) continue;

        return LexError{std::string("illegal character '") + c + "'",
                        Span{tok.span.begin, tok.span.begin + 1, tok.span.line,
                             tok.span.column}};
    }

    ts.trailing = std::move(pending_ws);
    Token eof;
    eof.kind = TokenKind::Eof;
    eof.span.begin = eof.span.end = static_cast<uint32_t>(bytes.size());
    eof.span.line = cur.line;
    eof.span.column = cur.col;
    ts.tokens.push_back(std::move(eof));
    return ts;
}

}  // namespace hlsrepair::cfront
