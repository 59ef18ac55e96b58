#include <objql/qlang/parser.hpp>

#include <charconv>
#include <cstdlib>

namespace objql::qlang {

namespace {

auto describe(const Token& t) -> std::string {
    switch (t.kind) {
        case TokenKind::Eof: return "end of input";
        case TokenKind::String: return "string \"" + t.lexeme + "\"";
        default: return "'" + t.lexeme + "'";
    }
}

auto make(Expr::Node node, SourcePos pos) -> ExprPtr {
    return std::make_shared<const Expr>(Expr{std::move(node), pos});
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    auto program() -> ProgramAst {
        ProgramAst p;
        while (!at(TokenKind::Eof)) {
            p.statements.push_back(statement());
            expect_punct(";");
        }
        return p;
    }

    auto standalone_expr() -> ExprPtr {
        ExprPtr e = expression();
        if (!at(TokenKind::Eof)) {
            fail({"end of input"});
        }
        return e;
    }

private:
    auto cur() const -> const Token& { return toks_[i_]; }
    auto at(TokenKind k) const -> bool { return cur().kind == k; }
    auto at_punct(std::string_view p) const -> bool {
        return cur().kind == TokenKind::Punct && cur().lexeme == p;
    }
    auto at_keyword(std::string_view k) const -> bool {
        return cur().kind == TokenKind::Keyword && cur().lexeme == k;
    }
    auto take() -> const Token& {
        const Token& t = toks_[i_];
        if (t.kind != TokenKind::Eof) {
            ++i_;
        }
        return t;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string what = "expected ";
        for (std::size_t k = 0; k < expected.size(); ++k) {
            if (k) {
                what += k + 1 == expected.size() ? " or " : ", ";
            }
            what += expected[k];
        }
        what += ", found " + describe(cur());
        throw ParseError(cur().pos, what, std::move(expected));
    }

    void expect_punct(std::string_view p) {
        if (!at_punct(p)) {
            fail({"'" + std::string(p) + "'"});
        }
        take();
    }

    void expect_keyword(std::string_view k) {
        if (!at_keyword(k)) {
            fail({"'" + std::string(k) + "'"});
        }
        take();
    }

    auto expect_name() -> const Token& {
        if (!at(TokenKind::Ident)) {
            fail({"name"});
        }
        return take();
    }

    // `key =`, `fkey =`, `bs =`, `reverse =`
    void expect_label(std::string_view label) {
        if (!(at(TokenKind::Ident) && cur().lexeme == label)) {
            fail({"'" + std::string(label) + "'"});
        }
        take();
        expect_punct("=");
    }

    auto statement() -> StatementAst {
        SourcePos pos = cur().pos;
        if (at_keyword("register")) {
            take();
            RegisterAst r;
            r.pos = pos;
            r.name = expect_name().lexeme;
            if (!at(TokenKind::String)) {
                fail({"path string"});
            }
            r.path = take().lexeme;
            if (at_keyword("as")) {
                take();
                if (at(TokenKind::Ident) && cur().lexeme == "jsonl") {
                    r.format = DataFormat::JsonLines;
                } else if (at(TokenKind::Ident) && cur().lexeme == "csv") {
                    r.format = DataFormat::Csv;
                } else {
                    fail({"'jsonl'", "'csv'"});
                }
                take();
            }
            return r;
        }
        if (!at(TokenKind::Ident)) {
            fail({"'register'", "name"});
        }
        QueryAst q;
        q.pos = pos;
        q.name = take().lexeme;
        expect_punct("<-");
        q.base = expect_name().lexeme;
        while (at_punct(".")) {
            take();
            q.ops.push_back(op());
        }
        return q;
    }

    auto op() -> OpAst {
        OpAst o;
        o.pos = cur().pos;
        if (!at(TokenKind::Keyword)) {
            fail({"operator"});
        }
        const std::string& name = cur().lexeme;
        if (name == "join") {
            o.kind = OpKind::Join;
            take();
            expect_punct("(");
            o.right_name = expect_name().lexeme;
            expect_punct(",");
            expect_label("key");
            o.fn = expression();
            expect_punct(",");
            expect_label("fkey");
            o.fkey = expression();
            expect_punct(")");
        } else if (name == "project") {
            o.kind = OpKind::Project;
            take();
            expect_punct("(");
            o.fn = expression();
            if (at_punct(",")) {
                take();
                expect_label("bs");
                if (!at(TokenKind::Int)) {
                    fail({"integer"});
                }
                const Token& t = take();
                std::int64_t bs = 0;
                std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), bs);
                if (bs < 1) {
                    throw ParseError(t.pos, "batch size must be at least 1", {"positive integer"});
                }
                o.batch_size = bs;
            }
            expect_punct(")");
        } else if (name == "filter" || name == "group_by" || name == "reduce") {
            o.kind = name == "filter"     ? OpKind::Filter
                     : name == "group_by" ? OpKind::GroupBy
                                          : OpKind::Reduce;
            take();
            expect_punct("(");
            o.fn = expression();
            expect_punct(")");
        } else if (name == "order_by") {
            o.kind = OpKind::OrderBy;
            take();
            expect_punct("(");
            o.fn = expression();
            if (at_punct(",")) {
                take();
                expect_label("reverse");
                if (at_keyword("true")) {
                    o.reverse = true;
                } else if (!at_keyword("false")) {
                    fail({"'true'", "'false'"});
                }
                take();
            }
            expect_punct(")");
        } else if (name == "flatten" || name == "unique") {
            o.kind = name == "flatten" ? OpKind::Flatten : OpKind::Unique;
            take();
            expect_punct("(");
            expect_punct(")");
        } else {
            fail({"operator"});
        }
        return o;
    }

    auto expression() -> ExprPtr { return conditional(); }

    auto conditional() -> ExprPtr {
        ExprPtr c = logical_or();
        if (at_punct("?")) {
            SourcePos pos = cur().pos;
            take();
            ExprPtr t = expression();
            expect_punct(":");
            ExprPtr f = expression();
            return make(expr::Cond{c, t, f}, pos);
        }
        return c;
    }

    template <typename Next>
    auto binary_level(Next next, std::initializer_list<std::pair<std::string_view, BinaryOp>> ops)
        -> ExprPtr {
        ExprPtr lhs = (this->*next)();
        for (;;) {
            bool matched = false;
            for (const auto& [sym, op] : ops) {
                if (at_punct(sym)) {
                    SourcePos pos = cur().pos;
                    take();
                    ExprPtr rhs = (this->*next)();
                    lhs = make(expr::Binary{op, lhs, rhs}, pos);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                return lhs;
            }
        }
    }

    auto logical_or() -> ExprPtr { return binary_level(&Parser::logical_and, {{"||", BinaryOp::Or}}); }
    auto logical_and() -> ExprPtr { return binary_level(&Parser::comparison, {{"&&", BinaryOp::And}}); }
    auto comparison() -> ExprPtr {
        return binary_level(&Parser::additive, {{"==", BinaryOp::Eq},
                                                {"!=", BinaryOp::Ne},
                                                {"<=", BinaryOp::Le},
                                                {">=", BinaryOp::Ge},
                                                {"<", BinaryOp::Lt},
                                                {">", BinaryOp::Gt}});
    }
    auto additive() -> ExprPtr {
        return binary_level(&Parser::multiplicative, {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}});
    }
    auto multiplicative() -> ExprPtr {
        return binary_level(&Parser::unary,
                            {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}});
    }

    auto unary() -> ExprPtr {
        if (at_punct("-") || at_punct("!")) {
            SourcePos pos = cur().pos;
            UnaryOp op = cur().lexeme == "-" ? UnaryOp::Neg : UnaryOp::Not;
            take();
            return make(expr::Unary{op, unary()}, pos);
        }
        return postfix();
    }

    auto postfix() -> ExprPtr {
        ExprPtr e = primary();
        for (;;) {
            if (at_punct(".")) {
                SourcePos pos = cur().pos;
                take();
                // Keywords are fine as field names: it.filter, it.key.
                if (!at(TokenKind::Ident) && !at(TokenKind::Keyword)) {
                    fail({"field name"});
                }
                e = make(expr::Field{e, take().lexeme}, pos);
            } else if (at_punct("[")) {
                SourcePos pos = cur().pos;
                take();
                ExprPtr idx = expression();
                expect_punct("]");
                e = make(expr::Index{e, idx}, pos);
            } else {
                return e;
            }
        }
    }

    auto primary() -> ExprPtr {
        const Token& t = cur();
        SourcePos pos = t.pos;
        switch (t.kind) {
            case TokenKind::Int: {
                std::int64_t v = 0;
                std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
                take();
                return make(expr::Literal{Value(v)}, pos);
            }
            case TokenKind::Float: {
                double d = std::strtod(t.lexeme.c_str(), nullptr);
                take();
                return make(expr::Literal{Value(d)}, pos);
            }
            case TokenKind::String: {
                Value v(t.lexeme);
                take();
                return make(expr::Literal{std::move(v)}, pos);
            }
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false") {
                    bool b = t.lexeme == "true";
                    take();
                    return make(expr::Literal{Value(b)}, pos);
                }
                if (t.lexeme == "null") {
                    take();
                    return make(expr::Literal{Value()}, pos);
                }
                if (t.lexeme == "it") {
                    take();
                    return make(expr::RowRef{}, pos);
                }
                break;
            case TokenKind::Ident: {
                if (t.lexeme.size() == 2 && t.lexeme[0] == '_' && t.lexeme[1] >= '0' &&
                    t.lexeme[1] <= '9') {
                    int idx = t.lexeme[1] - '0';
                    take();
                    return make(expr::PosRef{idx}, pos);
                }
                std::string name = t.lexeme;
                take();
                if (!at_punct("(")) {
                    // Only `it`, `_0`..`_9` and calls may start with a name.
                    i_--;
                    fail({"'it'", "'_0'..'_9'", "function call"});
                }
                take();
                std::vector<ExprPtr> args;
                if (!at_punct(")")) {
                    args.push_back(expression());
                    while (at_punct(",")) {
                        take();
                        args.push_back(expression());
                    }
                }
                expect_punct(")");
                return make(expr::Call{std::move(name), std::move(args)}, pos);
            }
            case TokenKind::Punct:
                if (t.lexeme == "(") {
                    take();
                    ExprPtr e = expression();
                    expect_punct(")");
                    return e;
                }
                if (t.lexeme == "[") {
                    take();
                    std::vector<ExprPtr> items;
                    if (!at_punct("]")) {
                        items.push_back(expression());
                        while (at_punct(",")) {
                            take();
                            items.push_back(expression());
                        }
                    }
                    expect_punct("]");
                    return make(expr::ListLit{std::move(items)}, pos);
                }
                if (t.lexeme == "{") {
                    take();
                    std::vector<std::pair<Value, ExprPtr>> entries;
                    if (!at_punct("}")) {
                        entries.push_back(map_entry());
                        while (at_punct(",")) {
                            take();
                            entries.push_back(map_entry());
                        }
                    }
                    expect_punct("}");
                    return make(expr::MapLit{std::move(entries)}, pos);
                }
                break;
            default: break;
        }
        fail({"expression"});
    }

    // NAME ":" expr | STRING ":" expr | INT ":" expr
    auto map_entry() -> std::pair<Value, ExprPtr> {
        Value key;
        if (at(TokenKind::Ident) || at(TokenKind::Keyword) || at(TokenKind::String)) {
            key = Value(cur().lexeme);
        } else if (at(TokenKind::Int)) {
            std::int64_t v = 0;
            std::from_chars(cur().lexeme.data(), cur().lexeme.data() + cur().lexeme.size(), v);
            key = Value(v);
        } else {
            fail({"map key"});
        }
        take();
        expect_punct(":");
        return {std::move(key), expression()};
    }

    const std::vector<Token>& toks_;
    std::size_t i_ = 0;
};

}  // namespace

auto parse_program(const std::vector<Token>& tokens) -> ProgramAst {
    return Parser(tokens).program();
}

auto parse_program(std::string_view src) -> ProgramAst {
    return parse_program(tokenize(src));
}

auto parse_expr(std::string_view src) -> ExprPtr {
    auto tokens = tokenize(src);
    return Parser(tokens).standalone_expr();
}

}  // namespace objql::qlang
