#include <objql/reference.hpp>

#include <chrono>
#include <exception>

namespace objql::reference {

namespace {

using Clock = std::chrono::steady_clock;

// Head/tail view of a table, so the recursive rules read like t:T.
using Rows = ValueList;

template <typename F>
auto call_udf(std::size_t row, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UdfError&) {
        throw;
    } catch (const std::exception& e) {
        throw UdfError(UdfError::npos, row, e.what());
    }
}

auto pair_or_append(const Value& left, const Value& right, bool left_is_join_product) -> Value {
    if (left_is_join_product && left.is_list()) {
        ValueList items = left.as_list();
        items.push_back(right);
        return Value::list(std::move(items));
    }
    return Value::list({left, right});
}

// Filter: sigma_s T.
auto filter_rows(const Rows& rows, const Udf& pred) -> Rows {
    Rows out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Value keep = call_udf(i, [&] { return pred(rows[i]); });
        if (!keep.is_bool()) {
            throw PredicateTypeError(UdfError::npos, i,
                                     "filter predicate returned " +
                                         std::string(kind_name(keep.kind())) + ", expected Bool");
        }
        if (keep.as_bool()) {
            out.push_back(rows[i]);
        }
    }
    return out;
}

// Project1 / Project2: f(t) : project(T), [] -> [].
auto project_rows(const Rows& rows, std::size_t at, const Udf& fn, Rows& out) -> void {
    if (at == rows.size()) {
        return;
    }
    out.push_back(call_udf(at, [&] { return fn(rows[at]); }));
    project_rows(rows, at + 1, fn, out);
}

// Group1 / Group2. Each step takes the head t, splits the tail into rows with
// f(x) = f(t) and f(x) != f(t), emits (f(t), t:T_=) and recurses on T_!=.
auto group_rows(const Rows& rows, const Udf& f, std::size_t depth) -> Rows {
    if (rows.empty()) {
        return {};
    }
    if (depth + 1 > trace().group_depth) {
        trace().group_depth = depth + 1;
    }
    const Value& head = rows.front();
    Value head_key = call_udf(0, [&] { return f(head); });
    Rows same{head};
    Rows rest;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        Value k = call_udf(i, [&] { return f(rows[i]); });
        if (value_equals(k, head_key)) {
            same.push_back(rows[i]);
        } else {
            rest.push_back(rows[i]);
        }
    }
    Rows out{Value::list({head_key, Value::list(std::move(same))})};
    Rows tail = group_rows(rest, f, depth + 1);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

// Unique1 / Unique2: t : unique(filter(x != t, T)).
auto unique_rows(const Rows& rows, std::size_t depth) -> Rows {
    if (rows.empty()) {
        return {};
    }
    if (depth + 1 > trace().unique_depth) {
        trace().unique_depth = depth + 1;
    }
    const Value& head = rows.front();
    Rows rest;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!value_equals(rows[i], head)) {
            rest.push_back(rows[i]);
        }
    }
    Rows out{head};
    Rows tail = unique_rows(rest, depth + 1);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

// Flatten1 / Flatten2, one level.
auto flatten_rows(const Rows& rows) -> Rows {
    Rows out;
    for (const auto& t : rows) {
        if (t.is_list() || t.is_set()) {
            for (const auto& item : t.items()) {
                out.push_back(item);
            }
        } else {
            out.push_back(t);
        }
    }
    return out;
}

// Stable insertion sort on key(row). Equal keys keep their input order,
// also when reversed.
auto order_rows(const Rows& rows, const Udf& f, bool reverse) -> Rows {
    ValueList keys;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        keys.push_back(call_udf(i, [&] { return f(rows[i]); }));
    }
    Rows out;
    ValueList out_keys;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t pos = out.size();
        while (pos > 0) {
            auto c = value_compare(out_keys[pos - 1], keys[i]);
            bool after = reverse ? c >= 0 : c <= 0;
            if (after) {
                break;
            }
            --pos;
        }
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), rows[i]);
        out_keys.insert(out_keys.begin() + static_cast<std::ptrdiff_t>(pos), keys[i]);
    }
    return out;
}

auto reduce_rows(const Table& t, const Udf& g) -> Table {
    ReduceResult r = call_udf(UdfError::npos, [&] { return g.apply_table(t); });
    if (auto* table = std::get_if<Table>(&r)) {
        return std::move(*table);
    }
    return Table{std::get<Value>(std::move(r))};
}

auto apply(const Database& db, const OperatorSpec& spec, const Table& in, bool join_product)
    -> Table {
    return std::visit(
        [&](const auto& o) -> Table {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ops::Join>) {
                return ref_join(in, db.at(o.right_name), o.key, o.fkey, join_product);
            } else if constexpr (std::is_same_v<T, ops::Project>) {
                // Batching is an optimisation only; semantics are pointwise.
                if (o.fn.kind() == UdfKind::Batch) {
                    Rows out;
                    for (std::size_t i = 0; i < in.size(); ++i) {
                        ValueList one = call_udf(
                            i, [&] { return o.fn.apply_batch(std::span<const Value>(&in[i], 1)); });
                        if (one.size() != 1) {
                            throw BatchArityError(UdfError::npos, i,
                                                  "batch of 1 row produced " +
                                                      std::to_string(one.size()) + " outputs");
                        }
                        out.push_back(std::move(one.front()));
                    }
                    return Table(std::move(out));
                }
                Rows out;
                project_rows(in.rows(), 0, o.fn, out);
                return Table(std::move(out));
            } else if constexpr (std::is_same_v<T, ops::Filter>) {
                return Table(filter_rows(in.rows(), o.pred));
            } else if constexpr (std::is_same_v<T, ops::OrderBy>) {
                return Table(order_rows(in.rows(), o.key, o.reverse));
            } else if constexpr (std::is_same_v<T, ops::GroupBy>) {
                return Table(group_rows(in.rows(), o.key, 0));
            } else if constexpr (std::is_same_v<T, ops::Flatten>) {
                return Table(flatten_rows(in.rows()));
            } else if constexpr (std::is_same_v<T, ops::Unique>) {
                return Table(unique_rows(in.rows(), 0));
            } else {
                return reduce_rows(in, o.fn);
            }
        },
        spec);
}

}  // namespace

auto trace() -> Trace& {
    static Trace t;
    return t;
}

auto ref_join(const Table& left, const Table& right, const Udf& key, const Udf& fkey,
              bool left_is_join_product) -> Table {
    // [[o_i, o_j] | o_i in T_i, o_j in T_j, f_k(o_i) = f_fk(o_j)]
    ValueList right_keys;
    right_keys.reserve(right.size());
    for (std::size_t j = 0; j < right.size(); ++j) {
        right_keys.push_back(call_udf(j, [&] { return fkey(right[j]); }));
    }
    Rows out;
    for (std::size_t i = 0; i < left.size(); ++i) {
        Value k = call_udf(i, [&] { return key(left[i]); });
        for (std::size_t j = 0; j < right.size(); ++j) {
            if (value_equals(k, right_keys[j])) {
                out.push_back(pair_or_append(left[i], right[j], left_is_join_product));
            }
        }
    }
    return Table(std::move(out));
}

auto ref_eval_query(const Database& db, const QueryPlan& plan) -> Table {
    return ref_eval_query(db, plan, nullptr);
}

auto ref_eval_query(const Database& db, const QueryPlan& plan, ProfileReport* profile) -> Table {
    auto start = Clock::now();
    // Query_n
    Table current = db.at(plan.base());
    for (const auto& op : plan.ops()) {
        if (const auto* join = std::get_if<ops::Join>(&op)) {
            db.at(join->right_name);
        }
    }
    // Query_Op, left to right.
    bool join_product = false;
    for (std::size_t i = 0; i < plan.ops().size(); ++i) {
        const auto& op = plan.ops()[i];
        auto op_start = Clock::now();
        Table next;
        try {
            next = apply(db, op, current, join_product);
        } catch (UdfError& e) {
            e.set_op_index(i);
            throw;
        }
        if (profile) {
            profile->entries.push_back(
                {std::string(op_name(op)), current.size(), next.size(),
                 std::chrono::duration<double>(Clock::now() - op_start).count()});
        }
        join_product = keeps_join_product(op, join_product);
        current = std::move(next);
    }
    if (profile) {
        profile->total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    }
    return current;
}

auto ref_eval_program(const Database& db, const Program& program) -> Database {
    return ref_eval_program(db, program, nullptr);
}

auto ref_eval_program(const Database& db, const Program& program,
                      std::vector<NamedProfile>* profiles) -> Database {
    // Program_E / Program_Reg / Program_Query.
    Database d = db;
    for (std::size_t i = 0; i < program.size(); ++i) {
        try {
            if (const auto* reg = std::get_if<RegisterStmt>(&program[i])) {
                d.put(reg->name, reg->table, reg->overwrite);
            } else {
                const auto& q = std::get<QueryStmt>(program[i]);
                ProfileReport report;
                Table t = ref_eval_query(d, q.plan, profiles ? &report : nullptr);
                if (profiles) {
                    profiles->push_back({q.name, std::move(report)});
                }
                d.put(q.name, std::move(t), true);
            }
        } catch (Error& e) {
            e.set_statement_index(i);
            throw;
        }
    }
    return d;
}

}  // namespace objql::reference
