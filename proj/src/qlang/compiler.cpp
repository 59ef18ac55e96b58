#include <objql/ingest.hpp>
#include <objql/qlang/compiler.hpp>
#include <objql/qlang/parser.hpp>

#include <cmath>
#include <limits>

namespace objql::qlang {

namespace {

auto kind_of(const Value& v) -> std::string { return std::string(kind_name(v.kind())); }

auto arith(BinaryOp op, const Value& a, const Value& b) -> Value {
    if (op == BinaryOp::Add) {
        if (a.is_text() && b.is_text()) {
            return a.as_text() + b.as_text();
        }
        if (a.is_list() && b.is_list()) {
            ValueList items = a.as_list();
            items.insert(items.end(), b.as_list().begin(), b.as_list().end());
            return Value::list(std::move(items));
        }
    }
    if (!a.is_numeric() || !b.is_numeric()) {
        throw EvalError("cannot apply '" + std::string(op_symbol(op)) + "' to " + kind_of(a) +
                        " and " + kind_of(b));
    }
    if (a.is_int() && b.is_int()) {
        std::int64_t x = a.as_int();
        std::int64_t y = b.as_int();
        std::int64_t r = 0;
        switch (op) {
            case BinaryOp::Add:
                if (__builtin_add_overflow(x, y, &r)) {
                    throw EvalError("integer overflow in '+'");
                }
                return r;
            case BinaryOp::Sub:
                if (__builtin_sub_overflow(x, y, &r)) {
                    throw EvalError("integer overflow in '-'");
                }
                return r;
            case BinaryOp::Mul:
                if (__builtin_mul_overflow(x, y, &r)) {
                    throw EvalError("integer overflow in '*'");
                }
                return r;
            case BinaryOp::Div:
                if (y == 0) {
                    throw EvalError("integer division by zero");
                }
                return static_cast<double>(x) / static_cast<double>(y);
            case BinaryOp::Mod:
                if (y == 0) {
                    throw EvalError("integer modulo by zero");
                }
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
                    return std::int64_t{0};
                }
                return x % y;
            default: break;
        }
    }
    double x = a.as_number();
    double y = b.as_number();
    switch (op) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div: return x / y;
        case BinaryOp::Mod: return std::fmod(x, y);
        default: break;
    }
    throw EvalError("bad arithmetic operator");
}

auto need_bool(const Value& v, std::string_view what) -> bool {
    if (!v.is_bool()) {
        throw EvalError(std::string(what) + " expects Bool, got " + kind_of(v));
    }
    return v.as_bool();
}

auto field_of(const Value& obj, const std::string& name) -> Value {
    if (!obj.is_map()) {
        throw EvalError("cannot read field '" + name + "' of " + kind_of(obj));
    }
    const Value* v = obj.find(name);
    if (!v) {
        throw EvalError("no field '" + name + "' in " + to_string(obj));
    }
    return *v;
}

auto index_of(const Value& obj, const Value& idx) -> Value {
    if (obj.is_list()) {
        if (!idx.is_int()) {
            throw EvalError("list index must be Int, got " + kind_of(idx));
        }
        auto i = idx.as_int();
        const auto& items = obj.as_list();
        if (i < 0 || static_cast<std::size_t>(i) >= items.size()) {
            throw EvalError("index " + std::to_string(i) + " out of range for list of length " +
                            std::to_string(items.size()));
        }
        return items[static_cast<std::size_t>(i)];
    }
    if (obj.is_map()) {
        const Value* v = nullptr;
        if (idx.is_text()) {
            v = obj.find(idx.as_text());
        } else if (idx.is_int()) {
            v = obj.find(idx.as_int());
        } else {
            throw EvalError("map key must be Text or Int, got " + kind_of(idx));
        }
        if (!v) {
            throw EvalError("no key " + to_string(idx) + " in " + to_string(obj));
        }
        return *v;
    }
    throw EvalError("cannot index into " + kind_of(obj));
}

auto compile_node(const Expr& e, const BuiltinRegistry& builtins) -> CompiledExpr;

auto compile_child(const ExprPtr& e, const BuiltinRegistry& builtins) -> CompiledExpr {
    return compile_node(*e, builtins);
}

auto compile_node(const Expr& e, const BuiltinRegistry& builtins) -> CompiledExpr {
    return std::visit(
        [&](const auto& n) -> CompiledExpr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, expr::Literal>) {
                return [v = n.value](const Value&) { return v; };
            } else if constexpr (std::is_same_v<T, expr::RowRef>) {
                return [](const Value& row) { return row; };
            } else if constexpr (std::is_same_v<T, expr::PosRef>) {
                return [i = n.index](const Value& row) -> Value {
                    if (!row.is_list()) {
                        throw EvalError("_" + std::to_string(i) + " used on a " + kind_of(row) +
                                        " row, expected a tuple");
                    }
                    const auto& items = row.as_list();
                    if (static_cast<std::size_t>(i) >= items.size()) {
                        throw EvalError("_" + std::to_string(i) + " out of range for a " +
                                        std::to_string(items.size()) + "-tuple");
                    }
                    return items[static_cast<std::size_t>(i)];
                };
            } else if constexpr (std::is_same_v<T, expr::Field>) {
                return [obj = compile_child(n.object, builtins), name = n.name](const Value& row) {
                    return field_of(obj(row), name);
                };
            } else if constexpr (std::is_same_v<T, expr::Index>) {
                return [obj = compile_child(n.object, builtins),
                        idx = compile_child(n.index, builtins)](const Value& row) {
                    return index_of(obj(row), idx(row));
                };
            } else if constexpr (std::is_same_v<T, expr::Unary>) {
                auto operand = compile_child(n.operand, builtins);
                if (n.op == UnaryOp::Not) {
                    return [operand](const Value& row) -> Value {
                        return !need_bool(operand(row), "'!'");
                    };
                }
                return [operand](const Value& row) -> Value {
                    Value v = operand(row);
                    if (v.is_int()) {
                        if (v.as_int() == std::numeric_limits<std::int64_t>::min()) {
                            throw EvalError("integer overflow in unary '-'");
                        }
                        return -v.as_int();
                    }
                    if (v.is_float()) {
                        return -v.as_float();
                    }
                    throw EvalError("cannot negate " + kind_of(v));
                };
            } else if constexpr (std::is_same_v<T, expr::Binary>) {
                auto lhs = compile_child(n.lhs, builtins);
                auto rhs = compile_child(n.rhs, builtins);
                switch (n.op) {
                    case BinaryOp::And:
                        return [lhs, rhs](const Value& row) -> Value {
                            return need_bool(lhs(row), "'&&'") && need_bool(rhs(row), "'&&'");
                        };
                    case BinaryOp::Or:
                        return [lhs, rhs](const Value& row) -> Value {
                            return need_bool(lhs(row), "'||'") || need_bool(rhs(row), "'||'");
                        };
                    case BinaryOp::Eq:
                        return [lhs, rhs](const Value& row) -> Value {
                            return value_equals(lhs(row), rhs(row));
                        };
                    case BinaryOp::Ne:
                        return [lhs, rhs](const Value& row) -> Value {
                            return !value_equals(lhs(row), rhs(row));
                        };
                    case BinaryOp::Lt:
                    case BinaryOp::Le:
                    case BinaryOp::Gt:
                    case BinaryOp::Ge:
                        return [lhs, rhs, op = n.op](const Value& row) -> Value {
                            auto c = value_compare(lhs(row), rhs(row));
                            switch (op) {
                                case BinaryOp::Lt: return c < 0;
                                case BinaryOp::Le: return c <= 0;
                                case BinaryOp::Gt: return c > 0;
                                default: return c >= 0;
                            }
                        };
                    default:
                        return [lhs, rhs, op = n.op](const Value& row) {
                            return arith(op, lhs(row), rhs(row));
                        };
                }
            } else if constexpr (std::is_same_v<T, expr::Cond>) {
                return [c = compile_child(n.cond, builtins), t = compile_child(n.then, builtins),
                        f = compile_child(n.otherwise, builtins)](const Value& row) {
                    return need_bool(c(row), "'?:'") ? t(row) : f(row);
                };
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                const Builtin* b = builtins.find(n.callee);
                if (!b) {
                    throw CompileError(e.pos, "unknown function '" + n.callee + "'");
                }
                if (n.args.size() < b->min_args || n.args.size() > b->max_args) {
                    throw CompileError(e.pos, "wrong number of arguments to '" + n.callee +
                                                  "': got " + std::to_string(n.args.size()));
                }
                std::vector<CompiledExpr> args;
                for (const auto& a : n.args) {
                    args.push_back(compile_child(a, builtins));
                }
                return [fn = b->fn, args = std::move(args), name = n.callee](const Value& row) {
                    ValueList values;
                    values.reserve(args.size());
                    for (const auto& a : args) {
                        values.push_back(a(row));
                    }
                    try {
                        return fn(std::span<const Value>(values));
                    } catch (const EvalError&) {
                        throw;
                    } catch (const std::exception& ex) {
                        throw EvalError(name + ": " + ex.what());
                    }
                };
            } else if constexpr (std::is_same_v<T, expr::ListLit>) {
                std::vector<CompiledExpr> items;
                for (const auto& i : n.items) {
                    items.push_back(compile_child(i, builtins));
                }
                return [items = std::move(items)](const Value& row) {
                    ValueList out;
                    out.reserve(items.size());
                    for (const auto& i : items) {
                        out.push_back(i(row));
                    }
                    return Value::list(std::move(out));
                };
            } else {
                std::vector<std::pair<Value, CompiledExpr>> entries;
                for (const auto& [k, v] : n.entries) {
                    entries.emplace_back(k, compile_child(v, builtins));
                }
                return [entries = std::move(entries)](const Value& row) {
                    std::vector<MapEntry> out;
                    out.reserve(entries.size());
                    for (const auto& [k, v] : entries) {
                        out.emplace_back(k, v(row));
                    }
                    return Value::map(std::move(out));
                };
            }
        },
        e.node);
}

auto reduce_udf(CompiledExpr fn) -> Udf {
    // `it` is the whole table as a list; a list result is the new table.
    return Udf::table([fn = std::move(fn)](const Table& t) -> ReduceResult {
        Value r = fn(t.as_value());
        if (r.is_list()) {
            return Table(r.as_list());
        }
        return r;
    });
}

auto infer_format(const RegisterAst& r) -> ingest::Format {
    if (r.format) {
        return *r.format == DataFormat::Csv ? ingest::Format::Csv : ingest::Format::JsonLines;
    }
    std::filesystem::path p(r.path);
    return p.extension() == ".csv" ? ingest::Format::Csv : ingest::Format::JsonLines;
}

auto lower_op(const OpAst& op, const BuiltinRegistry& builtins) -> OperatorSpec {
    auto fn = [&] { return compile_expr(op.fn, builtins); };
    switch (op.kind) {
        case OpKind::Join:
            return ops::Join{op.right_name, Udf::key(fn()), Udf::key(compile_expr(op.fkey, builtins))};
        case OpKind::Project: {
            std::optional<std::size_t> bs;
            if (op.batch_size) {
                bs = static_cast<std::size_t>(*op.batch_size);
            }
            return ops::Project{Udf::row(fn()), bs};
        }
        case OpKind::Filter: return ops::Filter{Udf::pred(fn())};
        case OpKind::OrderBy: return ops::OrderBy{Udf::key(fn()), op.reverse};
        case OpKind::GroupBy: return ops::GroupBy{Udf::key(fn())};
        case OpKind::Flatten: return ops::Flatten{};
        case OpKind::Unique: return ops::Unique{};
        case OpKind::Reduce: return ops::Reduce{reduce_udf(fn())};
    }
    throw Error("unknown operator");
}

}  // namespace

auto compile_expr(const ExprPtr& e, const BuiltinRegistry& builtins) -> CompiledExpr {
    return compile_node(*e, builtins);
}

auto eval_expr(const Expr& e, const Value& row) -> Value {
    static const BuiltinRegistry core = BuiltinRegistry::core();
    return compile_node(e, core)(row);
}

auto compile_program(const ProgramAst& ast, const CompileOptions& options) -> CompiledProgram {
    static const BuiltinRegistry core = BuiltinRegistry::core();
    const BuiltinRegistry& builtins = options.builtins ? *options.builtins : core;

    CompiledProgram out;
    for (std::size_t i = 0; i < ast.statements.size(); ++i) {
        const auto& stmt = ast.statements[i];
        try {
            if (const auto* r = std::get_if<RegisterAst>(&stmt)) {
                ingest::DatasetSource src{options.data_dir / r->path, infer_format(*r), true};
                out.program.push_back(RegisterStmt{r->name, ingest::load(src), false});
            } else {
                const auto& q = std::get<QueryAst>(stmt);
                QueryPlan plan(q.base);
                for (const auto& op : q.ops) {
                    plan = plan.then(lower_op(op, builtins));
                }
                out.program.push_back(QueryStmt{q.name, std::move(plan)});
                out.query_names.push_back(q.name);
            }
        } catch (Error& e) {
            e.set_statement_index(i);
            throw;
        }
        out.positions.push_back(statement_pos(stmt));
    }
    return out;
}

auto compile_script(std::string_view src, const CompileOptions& options) -> CompiledProgram {
    return compile_program(parse_program(src), options);
}

}  // namespace objql::qlang
