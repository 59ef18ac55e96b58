#include <objql/qlang/ast.hpp>

namespace objql::qlang {

namespace {

auto quote(const std::string& s) -> std::string {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out + "\"";
}

auto literal_source(const Value& v) -> std::string {
    switch (v.kind()) {
        case Value::Kind::Text: return quote(v.as_text());
        case Value::Kind::Float: return format_double(v.as_float());
        default: return to_string(v);
    }
}

void print(const Expr& e, std::string& out);

void print_args(const std::vector<ExprPtr>& args, std::string& out) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) {
            out += ", ";
        }
        print(*args[i], out);
    }
}

void print(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, expr::Literal>) {
                out += literal_source(n.value);
            } else if constexpr (std::is_same_v<T, expr::RowRef>) {
                out += "it";
            } else if constexpr (std::is_same_v<T, expr::PosRef>) {
                out += "_" + std::to_string(n.index);
            } else if constexpr (std::is_same_v<T, expr::Field>) {
                print(*n.object, out);
                out += "." + n.name;
            } else if constexpr (std::is_same_v<T, expr::Index>) {
                print(*n.object, out);
                out += "[";
                print(*n.index, out);
                out += "]";
            } else if constexpr (std::is_same_v<T, expr::Unary>) {
                out += op_symbol(n.op);
                out += "(";
                print(*n.operand, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, expr::Binary>) {
                out += "(";
                print(*n.lhs, out);
                out += " ";
                out += op_symbol(n.op);
                out += " ";
                print(*n.rhs, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, expr::Cond>) {
                out += "(";
                print(*n.cond, out);
                out += " ? ";
                print(*n.then, out);
                out += " : ";
                print(*n.otherwise, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                out += n.callee + "(";
                print_args(n.args, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, expr::ListLit>) {
                out += "[";
                print_args(n.items, out);
                out += "]";
            } else if constexpr (std::is_same_v<T, expr::MapLit>) {
                out += "{";
                for (std::size_t i = 0; i < n.entries.size(); ++i) {
                    if (i) {
                        out += ", ";
                    }
                    const Value& k = n.entries[i].first;
                    out += k.is_text() ? quote(k.as_text()) : to_string(k);
                    out += ": ";
                    print(*n.entries[i].second, out);
                }
                out += "}";
            }
        },
        e.node);
}

auto same(const ExprPtr& a, const ExprPtr& b) -> bool {
    if (!a || !b) {
        return !a && !b;
    }
    return same_shape(*a, *b);
}

auto same_all(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) -> bool {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

auto op_symbol(UnaryOp op) -> std::string_view { return op == UnaryOp::Neg ? "-" : "!"; }

auto op_symbol(BinaryOp op) -> std::string_view {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

auto op_kind_name(OpKind k) -> std::string_view {
    switch (k) {
        case OpKind::Join: return "join";
        case OpKind::Project: return "project";
        case OpKind::Filter: return "filter";
        case OpKind::OrderBy: return "order_by";
        case OpKind::GroupBy: return "group_by";
        case OpKind::Flatten: return "flatten";
        case OpKind::Unique: return "unique";
        case OpKind::Reduce: return "reduce";
    }
    return "?";
}

auto statement_pos(const StatementAst& s) -> SourcePos {
    return std::visit([](const auto& st) { return st.pos; }, s);
}

auto same_shape(const Expr& a, const Expr& b) -> bool {
    if (a.node.index() != b.node.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, expr::Literal>) {
                return value_identical(x.value, y.value);
            } else if constexpr (std::is_same_v<T, expr::RowRef>) {
                return true;
            } else if constexpr (std::is_same_v<T, expr::PosRef>) {
                return x.index == y.index;
            } else if constexpr (std::is_same_v<T, expr::Field>) {
                return x.name == y.name && same(x.object, y.object);
            } else if constexpr (std::is_same_v<T, expr::Index>) {
                return same(x.object, y.object) && same(x.index, y.index);
            } else if constexpr (std::is_same_v<T, expr::Unary>) {
                return x.op == y.op && same(x.operand, y.operand);
            } else if constexpr (std::is_same_v<T, expr::Binary>) {
                return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, expr::Cond>) {
                return same(x.cond, y.cond) && same(x.then, y.then) &&
                       same(x.otherwise, y.otherwise);
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                return x.callee == y.callee && same_all(x.args, y.args);
            } else if constexpr (std::is_same_v<T, expr::ListLit>) {
                return same_all(x.items, y.items);
            } else {
                if (x.entries.size() != y.entries.size()) {
                    return false;
                }
                for (std::size_t i = 0; i < x.entries.size(); ++i) {
                    if (!value_identical(x.entries[i].first, y.entries[i].first) ||
                        !same(x.entries[i].second, y.entries[i].second)) {
                        return false;
                    }
                }
                return true;
            }
        },
        a.node);
}

auto same_shape(const ProgramAst& a, const ProgramAst& b) -> bool {
    if (a.statements.size() != b.statements.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        const auto& sa = a.statements[i];
        const auto& sb = b.statements[i];
        if (sa.index() != sb.index()) {
            return false;
        }
        if (const auto* ra = std::get_if<RegisterAst>(&sa)) {
            const auto& rb = std::get<RegisterAst>(sb);
            if (ra->name != rb.name || ra->path != rb.path || ra->format != rb.format) {
                return false;
            }
            continue;
        }
        const auto& qa = std::get<QueryAst>(sa);
        const auto& qb = std::get<QueryAst>(sb);
        if (qa.name != qb.name || qa.base != qb.base || qa.ops.size() != qb.ops.size()) {
            return false;
        }
        for (std::size_t k = 0; k < qa.ops.size(); ++k) {
            const auto& x = qa.ops[k];
            const auto& y = qb.ops[k];
            if (x.kind != y.kind || x.right_name != y.right_name || x.batch_size != y.batch_size ||
                x.reverse != y.reverse || !same(x.fn, y.fn) || !same(x.fkey, y.fkey)) {
                return false;
            }
        }
    }
    return true;
}

auto to_source(const Expr& e) -> std::string {
    std::string out;
    print(e, out);
    return out;
}

auto to_source(const ProgramAst& p) -> std::string {
    std::string out;
    for (const auto& s : p.statements) {
        if (const auto* r = std::get_if<RegisterAst>(&s)) {
            out += "register " + r->name + " " + quote(r->path);
            if (r->format) {
                out += *r->format == DataFormat::Csv ? " as csv" : " as jsonl";
            }
            out += ";\n";
            continue;
        }
        const auto& q = std::get<QueryAst>(s);
        out += q.name + " <- " + q.base;
        for (const auto& op : q.ops) {
            out += "\n  .";
            out += op_kind_name(op.kind);
            out += "(";
            switch (op.kind) {
                case OpKind::Join:
                    out += op.right_name + ", key=" + to_source(*op.fn) +
                           ", fkey=" + to_source(*op.fkey);
                    break;
                case OpKind::Project:
                    out += to_source(*op.fn);
                    if (op.batch_size) {
                        out += ", bs=" + std::to_string(*op.batch_size);
                    }
                    break;
                case OpKind::OrderBy:
                    out += to_source(*op.fn);
                    if (op.reverse) {
                        out += ", reverse=true";
                    }
                    break;
                case OpKind::Filter:
                case OpKind::GroupBy:
                case OpKind::Reduce: out += to_source(*op.fn); break;
                case OpKind::Flatten:
                case OpKind::Unique: break;
            }
            out += ")";
        }
        out += ";\n";
    }
    return out;
}

}  // namespace objql::qlang
