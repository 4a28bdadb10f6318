#include "featrend/token.hpp"

#include "featrend/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace featrend {

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Operator: return "operator";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::Number: return "number";
    case TokenKind::Comment: return "comment";
    case TokenKind::Whitespace: return "whitespace";
    case TokenKind::Other: return "other";
    }
    return "other";
}

bool is_hard_keyword(std::string_view word) {
    static const std::array<std::string_view, 30> kw = {
        "as", "break", "class", "continue", "do", "else", "false", "for",
        "fun", "if", "in", "interface", "is", "null", "object", "package",
        "return", "super", "this", "throw", "true", "try", "typealias",
        "typeof", "val", "var", "when", "while", "!in", "!is"};
    return std::find(kw.begin(), kw.end(), word) != kw.end();
}

int physical_line_count(std::string_view source) {
    if (source.empty())
        return 0;
    int lines = 0;
    for (char c : source)
        if (c == '\n')
            ++lines;
    if (source.back() != '\n')
        ++lines;
    return lines;
}

namespace {

// Validates UTF-8, returning the byte offset of the first invalid sequence
// or npos when the input is well formed.
std::size_t find_utf8_error(std::string_view s) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len;
        unsigned cp_min;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp_min = 0x80;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp_min = 0x800;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp_min = 0x10000;
        } else {
            return i;
        }
        if (i + len > n)
            return i;
        unsigned cp = c & (0x7F >> len);
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80)
                return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp < cp_min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return i;
        i += len;
    }
    return std::string_view::npos;
}

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_ident_part(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            std::size_t start = pos_;
            int line = line_, col = col_;
            TokenKind kind = next();
            Token tok;
            tok.kind = kind;
            tok.text.assign(src_.substr(start, pos_ - start));
            tok.line = line;
            tok.column = col;
            advance_position(tok.text);
            out.push_back(std::move(tok));
        }
        return out;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }
    bool starts_with(std::string_view s) const {
        return src_.compare(pos_, s.size(), s) == 0;
    }

    void advance_position(std::string_view text) {
        for (char c : text) {
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    TokenKind next() {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            while (pos_ < src_.size()) {
                char w = peek();
                if (w == ' ' || w == '\t' || w == '\r' || w == '\n' || w == '\f' || w == '\v')
                    ++pos_;
                else
                    break;
            }
            return TokenKind::Whitespace;
        }
        if (starts_with("//") || (pos_ == 0 && starts_with("#!"))) {
            while (pos_ < src_.size() && peek() != '\n')
                ++pos_;
            return TokenKind::Comment;
        }
        if (starts_with("/*")) {
            lex_block_comment();
            return TokenKind::Comment;
        }
        if (starts_with("\"\"\"")) {
            lex_raw_string();
            return TokenKind::StringLiteral;
        }
        if (c == '"') {
            lex_escaped_string();
            return TokenKind::StringLiteral;
        }
        if (c == '\'') {
            lex_char_literal();
            return TokenKind::Other;
        }
        if (c == '`') {
            ++pos_;
            while (pos_ < src_.size() && peek() != '`' && peek() != '\n')
                ++pos_;
            if (peek() == '`')
                ++pos_;
            return TokenKind::Identifier;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            lex_number();
            return TokenKind::Number;
        }
        if (is_ident_start(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(peek())))
                ++pos_;
            std::string_view word = src_.substr(start, pos_ - start);
            return is_hard_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
        }
        return lex_operator();
    }

    // Kotlin block comments nest.
    void lex_block_comment() {
        pos_ += 2;
        int depth = 1;
        while (pos_ < src_.size() && depth > 0) {
            if (starts_with("/*")) {
                ++depth;
                pos_ += 2;
            } else if (starts_with("*/")) {
                --depth;
                pos_ += 2;
            } else {
                ++pos_;
            }
        }
    }

    void lex_char_literal() {
        ++pos_;
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == '\\' && pos_ + 1 < src_.size()) {
                pos_ += 2;
                continue;
            }
            if (c == '\'' || c == '\n') {
                if (c == '\'')
                    ++pos_;
                return;
            }
            ++pos_;
        }
    }

    void lex_number() {
        if (starts_with("0x") || starts_with("0X")) {
            pos_ += 2;
            while (pos_ < src_.size() &&
                   (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                ++pos_;
        } else if (starts_with("0b") || starts_with("0B")) {
            pos_ += 2;
            while (pos_ < src_.size() && (peek() == '0' || peek() == '1' || peek() == '_'))
                ++pos_;
        } else {
            auto digits = [&] {
                while (pos_ < src_.size() &&
                       (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                    ++pos_;
            };
            digits();
            // decimal point only when followed by a digit, so `1..2` and
            // `1.let` lex the integer alone
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                ++pos_;
                digits();
            }
            if (peek() == 'e' || peek() == 'E') {
                std::size_t save = pos_;
                ++pos_;
                if (peek() == '+' || peek() == '-')
                    ++pos_;
                if (std::isdigit(static_cast<unsigned char>(peek())))
                    digits();
                else
                    pos_ = save;
            }
        }
        while (pos_ < src_.size() &&
               (peek() == 'L' || peek() == 'f' || peek() == 'F' || peek() == 'u' || peek() == 'U'))
            ++pos_;
    }

    // Template hole `${...}` — balanced braces, aware of nested strings,
    // char literals and comments.
    void skip_template_hole() {
        pos_ += 2; // "${"
        int depth = 1;
        while (pos_ < src_.size() && depth > 0) {
            if (starts_with("\"\"\"")) {
                lex_raw_string();
            } else if (peek() == '"') {
                lex_escaped_string();
            } else if (peek() == '\'') {
                lex_char_literal();
            } else if (starts_with("//")) {
                while (pos_ < src_.size() && peek() != '\n')
                    ++pos_;
            } else if (starts_with("/*")) {
                lex_block_comment();
            } else if (peek() == '{') {
                ++depth;
                ++pos_;
            } else if (peek() == '}') {
                --depth;
                ++pos_;
            } else {
                ++pos_;
            }
        }
    }

    void lex_escaped_string() {
        ++pos_; // opening quote
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == '\\' && pos_ + 1 < src_.size()) {
                pos_ += 2;
                continue;
            }
            if (c == '"') {
                ++pos_;
                return;
            }
            if (c == '\n')
                return; // unterminated: end at line break
            if (c == '$' && peek(1) == '{') {
                skip_template_hole();
                continue;
            }
            ++pos_;
        }
    }

    void lex_raw_string() {
        pos_ += 3;
        while (pos_ < src_.size()) {
            if (peek() == '$' && peek(1) == '{') {
                skip_template_hole();
                continue;
            }
            if (peek() == '"') {
                std::size_t run = 0;
                while (peek(run) == '"')
                    ++run;
                if (run >= 3) {
                    // quotes beyond the last three belong to the content
                    pos_ += run;
                    return;
                }
                pos_ += run;
                continue;
            }
            ++pos_;
        }
    }

    TokenKind lex_operator() {
        static const std::string_view multi[] = {
            "===", "!==", "..<", "!in", "!is", "?.", "!!", "..", "->", "==",
            "!=",  "<=",  ">=",  "&&",  "||",  "++", "--", "+=", "-=", "*=",
            "/=",  "%=",  "?:",  "::",
        };
        for (std::string_view op : multi) {
            if (starts_with(op)) {
                // `!in`/`!is` only when not part of a longer identifier
                if ((op == "!in" || op == "!is") &&
                    is_ident_part(static_cast<unsigned char>(peek(op.size()))))
                    continue;
                pos_ += op.size();
                return op == "!in" || op == "!is" ? TokenKind::Keyword : TokenKind::Operator;
            }
        }
        char c = peek();
        ++pos_;
        static const std::string_view single = "+-*/%=<>!?:;,.()[]{}@&|^~$#";
        if (single.find(c) != std::string_view::npos)
            return TokenKind::Operator;
        return TokenKind::Other;
    }
};

} // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& path) {
    if (std::size_t bad = find_utf8_error(source); bad != std::string_view::npos)
        throw DecodeError(path, bad);
    return Lexer(source).run();
}

} // namespace featrend

namespace featrend {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::PathNotFound: return "PathNotFound";
    case ErrorCode::RepoNotFound: return "RepoNotFound";
    case ErrorCode::BranchNotFound: return "BranchNotFound";
    case ErrorCode::EmptyRepository: return "EmptyRepository";
    case ErrorCode::GitFailure: return "GitFailure";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::InputMismatch: return "InputMismatch";
    case ErrorCode::NoKotlinCommit: return "NoKotlinCommit";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

} // namespace featrend
