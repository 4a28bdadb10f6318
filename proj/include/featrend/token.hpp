#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace featrend {

enum class TokenKind {
    Keyword,
    Identifier,
    Operator,
    StringLiteral,
    Number,
    Comment,
    Whitespace,
    Other,
};

const char* token_kind_name(TokenKind kind);

// One lexical unit. Concatenating the text of all tokens in order
// reproduces the input byte-for-byte.
struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;   // 1-based
    int column = 1; // 1-based byte column

    bool is_trivia() const {
        return kind == TokenKind::Whitespace || kind == TokenKind::Comment;
    }
};

// Lexes Kotlin source. Strings (escaped, raw, with template holes) and
// nested block comments are each a single token. Throws DecodeError when
// the input is not valid UTF-8.
std::vector<Token> tokenize(std::string_view source, const std::string& path = "");

bool is_hard_keyword(std::string_view word);

// Number of physical lines ('\n'-separated; a trailing fragment counts).
int physical_line_count(std::string_view source);

} // namespace featrend
