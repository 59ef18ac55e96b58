#include <objql/qlang/parser.hpp>

#include <array>
#include <charconv>
#include <cstdint>

namespace objql::qlang {

namespace {

constexpr std::array kKeywords = {
    "register", "as",       "it",       "true",    "false",  "null",   "join",
    "project",  "filter",   "order_by", "group_by", "flatten", "unique", "reduce",
};

// Longest first, so two-character operators win.
constexpr std::array kPuncts = {
    "<-", "<=", ">=", "==", "!=", "&&", "||", "(", ")", "[", "]", "{", "}", ",",
    ".",  ";",  ":",  "?",  "=",  "<",  ">",  "+", "-", "*", "/", "%", "!",
};

auto is_ident_start(char c) -> bool {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

auto is_digit(char c) -> bool { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    auto run() -> std::vector<Token> {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            if (at_end()) {
                out.push_back({TokenKind::Eof, "", here()});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    auto at_end() const -> bool { return i_ >= src_.size(); }
    auto peek(std::size_t ahead = 0) const -> char {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    auto here() const -> SourcePos { return {line_, col_}; }

    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!at_end() && peek() != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    auto next() -> Token {
        SourcePos start = here();
        char c = peek();
        if (is_ident_start(c)) {
            std::size_t b = i_;
            while (!at_end() && (is_ident_start(peek()) || is_digit(peek()))) {
                advance();
            }
            std::string word(src_.substr(b, i_ - b));
            for (const char* kw : kKeywords) {
                if (word == kw) {
                    return {TokenKind::Keyword, word, start};
                }
            }
            return {TokenKind::Ident, word, start};
        }
        if (is_digit(c)) {
            return number(start);
        }
        if (c == '"') {
            return string(start);
        }
        for (std::string_view p : kPuncts) {
            if (src_.substr(i_, p.size()) == p) {
                for (std::size_t k = 0; k < p.size(); ++k) {
                    advance();
                }
                return {TokenKind::Punct, std::string(p), start};
            }
        }
        throw LexError(start, std::string("illegal character '") + c + "'");
    }

    // digits [ "." digits* ] [ ("e"|"E") ["+"|"-"] digits ]; `1.` is the float 1.0.
    auto number(SourcePos start) -> Token {
        std::size_t b = i_;
        bool is_float = false;
        while (is_digit(peek())) {
            advance();
        }
        if (peek() == '.' && !is_ident_start(peek(1))) {
            is_float = true;
            advance();
            while (is_digit(peek())) {
                advance();
            }
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t ahead = 1;
            if (peek(ahead) == '+' || peek(ahead) == '-') {
                ++ahead;
            }
            if (is_digit(peek(ahead))) {
                is_float = true;
                for (std::size_t k = 0; k < ahead; ++k) {
                    advance();
                }
                while (is_digit(peek())) {
                    advance();
                }
            }
        }
        std::string text(src_.substr(b, i_ - b));
        if (is_float) {
            return {TokenKind::Float, text, start};
        }
        std::int64_t v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc()) {
            throw LexError(start, "integer literal out of range: " + text);
        }
        return {TokenKind::Int, text, start};
    }

    auto string(SourcePos start) -> Token {
        advance();  // opening quote
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') {
                throw LexError(start, "unterminated string literal");
            }
            char c = peek();
            if (c == '"') {
                advance();
                return {TokenKind::String, out, start};
            }
            if (c == '\\') {
                SourcePos esc = here();
                advance();
                if (at_end()) {
                    throw LexError(start, "unterminated string literal");
                }
                switch (peek()) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    default:
                        throw LexError(esc, std::string("unknown escape '\\") + peek() + "'");
                }
                advance();
                continue;
            }
            out.push_back(c);
            advance();
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

auto token_kind_name(TokenKind k) -> std::string_view {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Int: return "integer";
        case TokenKind::Float: return "float";
        case TokenKind::String: return "string";
        case TokenKind::Punct: return "punctuation";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Eof: return "end of input";
    }
    return "?";
}

auto tokenize(std::string_view src) -> std::vector<Token> {
    return Lexer(src).run();
}

}  // namespace objql::qlang
