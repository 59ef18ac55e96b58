#pragma once

#include <objql/errors.hpp>
#include <objql/value.hpp>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace objql::qlang {

enum class TokenKind { Ident, Int, Float, String, Punct, Keyword, Eof };

struct Token {
    TokenKind kind;
    /// Source text, except for String tokens where escapes are decoded.
    std::string lexeme;
    SourcePos pos;
};

auto token_kind_name(TokenKind k) -> std::string_view;

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

auto op_symbol(UnaryOp op) -> std::string_view;
auto op_symbol(BinaryOp op) -> std::string_view;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace expr {

struct Literal {
    Value value;
};
/// `it`: the whole row.
struct RowRef {};
/// `_0` .. `_9`: an element of a join tuple.
struct PosRef {
    int index;
};
struct Field {
    ExprPtr object;
    std::string name;
};
struct Index {
    ExprPtr object;
    ExprPtr index;
};
struct Unary {
    UnaryOp op;
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Cond {
    ExprPtr cond;
    ExprPtr then;
    ExprPtr otherwise;
};
struct Call {
    std::string callee;
    std::vector<ExprPtr> args;
};
struct ListLit {
    std::vector<ExprPtr> items;
};
/// Keys are Text or Int literals.
struct MapLit {
    std::vector<std::pair<Value, ExprPtr>> entries;
};

}  // namespace expr

struct Expr {
    using Node = std::variant<expr::Literal, expr::RowRef, expr::PosRef, expr::Field, expr::Index,
                              expr::Unary, expr::Binary, expr::Cond, expr::Call, expr::ListLit,
                              expr::MapLit>;
    Node node;
    SourcePos pos;
};

enum class OpKind { Join, Project, Filter, OrderBy, GroupBy, Flatten, Unique, Reduce };

auto op_kind_name(OpKind k) -> std::string_view;

struct OpAst {
    OpKind kind;
    SourcePos pos;
    /// join: right table.
    std::string right_name;
    /// join: key; project/filter/order_by/group_by/reduce: the function.
    ExprPtr fn;
    /// join: foreign key.
    ExprPtr fkey;
    std::optional<std::int64_t> batch_size;
    bool reverse = false;
};

enum class DataFormat { JsonLines, Csv };

struct RegisterAst {
    std::string name;
    std::string path;
    std::optional<DataFormat> format;
    SourcePos pos;
};

struct QueryAst {
    std::string name;
    std::string base;
    std::vector<OpAst> ops;
    SourcePos pos;
};

using StatementAst = std::variant<RegisterAst, QueryAst>;

struct ProgramAst {
    std::vector<StatementAst> statements;
};

auto statement_pos(const StatementAst& s) -> SourcePos;

/// Structural equality, ignoring source positions.
auto same_shape(const Expr& a, const Expr& b) -> bool;
auto same_shape(const ProgramAst& a, const ProgramAst& b) -> bool;

/// Renders source that parses back to an equal AST. Binary and conditional
/// expressions are fully parenthesised.
auto to_source(const Expr& e) -> std::string;
auto to_source(const ProgramAst& p) -> std::string;

}  // namespace objql::qlang
