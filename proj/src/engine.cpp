#include <objql/engine.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <future>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace objql {

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs f, converting any exception it throws into a UdfError at `row`.
template <typename F>
auto guarded(std::size_t row, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UdfError&) {
        throw;
    } catch (const std::exception& e) {
        throw UdfError(UdfError::npos, row, e.what());
    }
}

auto tuple_with(const Value& left, const Value& right, bool left_is_join_product) -> Value {
    if (left_is_join_product && left.is_list()) {
        ValueList items = left.as_list();
        items.push_back(right);
        return Value::list(std::move(items));
    }
    return Value::list({left, right});
}

auto project_chunk(const Udf& fn, std::span<const Value> rows, std::size_t first_row)
    -> ValueList {
    if (fn.kind() == UdfKind::Batch) {
        ValueList out = guarded(first_row, [&] { return fn.apply_batch(rows); });
        if (out.size() != rows.size()) {
            throw BatchArityError(UdfError::npos, first_row,
                                  "batch of " + std::to_string(rows.size()) + " rows produced " +
                                      std::to_string(out.size()) + " outputs");
        }
        return out;
    }
    ValueList out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.push_back(guarded(first_row + i, [&] { return fn(rows[i]); }));
    }
    return out;
}

}  // namespace

auto Database::at(const std::string& name) const -> const Table& {
    auto it = tables_.find(name);
    if (it == tables_.end()) {
        throw UnknownTable(name);
    }
    return *it->second;
}

auto Database::find(const std::string& name) const -> std::shared_ptr<const Table> {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : it->second;
}

auto Database::names() const -> std::vector<std::string> {
    std::vector<std::string> out;
    out.reserve(tables_.size());
    for (const auto& [name, _] : tables_) {
        out.push_back(name);
    }
    return out;
}

void Database::put(const std::string& name, Table table, bool overwrite) {
    put(name, std::make_shared<const Table>(std::move(table)), overwrite);
}

void Database::put(const std::string& name, std::shared_ptr<const Table> table, bool overwrite) {
    if (!overwrite && contains(name)) {
        throw DuplicateName(name);
    }
    tables_[name] = std::move(table);
}

auto operator==(const Database& a, const Database& b) -> bool {
    if (a.tables_.size() != b.tables_.size()) {
        return false;
    }
    for (const auto& [name, table] : a.tables_) {
        auto other = b.find(name);
        if (!other || !(*other == *table)) {
            return false;
        }
    }
    return true;
}

auto db_register(Database db, const std::string& name, Table table, bool overwrite) -> Database {
    db.put(name, std::move(table), overwrite);
    return db;
}

auto Udf::args(UdfKind kind, ArgsFn fn) -> Udf {
    return Udf(kind, std::move(fn), UdfAdapt::Destructure);
}

auto Udf::batch(BatchFn fn) -> Udf {
    return Udf(UdfKind::Batch, std::move(fn));
}

auto Udf::table(TableFn fn) -> Udf {
    return Udf(UdfKind::Table, std::move(fn));
}

auto Udf::operator()(const Value& row) const -> Value {
    if (const auto* f = std::get_if<RowFn>(fn_.get())) {
        return (*f)(row);
    }
    if (const auto* f = std::get_if<ArgsFn>(fn_.get())) {
        if (row.is_list()) {
            const auto& items = row.as_list();
            return (*f)(std::span<const Value>(items.data(), items.size()));
        }
        return (*f)(std::span<const Value>(&row, 1));
    }
    throw TypeMismatch("batch and table functions cannot be applied to a single row");
}

auto Udf::apply_batch(std::span<const Value> rows) const -> ValueList {
    if (const auto* f = std::get_if<BatchFn>(fn_.get())) {
        return (*f)(rows);
    }
    ValueList out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back((*this)(r));
    }
    return out;
}

auto Udf::apply_table(const Table& t) const -> ReduceResult {
    if (const auto* f = std::get_if<TableFn>(fn_.get())) {
        return (*f)(t);
    }
    throw TypeMismatch("reduce requires a table function");
}

auto op_name(const OperatorSpec& op) -> std::string_view {
    static constexpr std::string_view names[] = {"join",     "project", "filter", "order_by",
                                                 "group_by", "flatten", "unique", "reduce"};
    return names[op.index()];
}

auto QueryPlan::then(OperatorSpec op) const -> QueryPlan {
    QueryPlan next = *this;
    next.ops_.push_back(std::move(op));
    return next;
}

auto QueryPlan::join(std::string right, Udf key, Udf fkey) const -> QueryPlan {
    return then(ops::Join{std::move(right), std::move(key), std::move(fkey)});
}
auto QueryPlan::project(Udf fn, std::optional<std::size_t> batch_size) const -> QueryPlan {
    return then(ops::Project{std::move(fn), batch_size});
}
auto QueryPlan::filter(Udf pred) const -> QueryPlan {
    return then(ops::Filter{std::move(pred)});
}
auto QueryPlan::order_by(Udf key, bool reverse) const -> QueryPlan {
    return then(ops::OrderBy{std::move(key), reverse});
}
auto QueryPlan::group_by(Udf key) const -> QueryPlan {
    return then(ops::GroupBy{std::move(key)});
}
auto QueryPlan::flatten() const -> QueryPlan { return then(ops::Flatten{}); }
auto QueryPlan::unique() const -> QueryPlan { return then(ops::Unique{}); }
auto QueryPlan::reduce(Udf fn) const -> QueryPlan { return then(ops::Reduce{std::move(fn)}); }

auto ProfileReport::operator_seconds() const -> double {
    double s = 0;
    for (const auto& e : entries) {
        s += e.seconds;
    }
    return s;
}

auto ProfileReport::render() const -> std::string {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10s\n", "op", "in_rows", "out_rows",
                  "seconds");
    out += line;
    for (const auto& e : entries) {
        std::snprintf(line, sizeof line, "%-10s %10zu %10zu %10.3f\n", e.op.c_str(), e.in_rows,
                      e.out_rows, e.seconds);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10.3f\n", "total", "", "", total_seconds);
    out += line;
    return out;
}

auto op_join(const Database& db, const Table& left, const std::string& right_name,
             const Udf& key, const Udf& fkey, bool left_is_join_product) -> Table {
    const Table& right = db.at(right_name);

    // Build: canonical key of fkey(o_j) -> right row indices in table order.
    std::unordered_map<std::string, std::vector<std::size_t>> index;
    index.reserve(right.size());
    std::string scratch;
    for (std::size_t j = 0; j < right.size(); ++j) {
        Value k = guarded(j, [&] { return fkey(right[j]); });
        scratch.clear();
        canonical_encode_into(k, scratch);
        index[scratch].push_back(j);
    }

    // Probe in left order; matches come out in right-table order.
    ValueList out;
    for (std::size_t i = 0; i < left.size(); ++i) {
        Value k = guarded(i, [&] { return key(left[i]); });
        scratch.clear();
        canonical_encode_into(k, scratch);
        auto hit = index.find(scratch);
        if (hit == index.end()) {
            continue;
        }
        for (std::size_t j : hit->second) {
            out.push_back(tuple_with(left[i], right[j], left_is_join_product));
        }
    }
    return Table(std::move(out));
}

auto op_project(const Table& t, const Udf& fn) -> Table {
    return Table(project_chunk(fn, std::span<const Value>(t.rows()), 0));
}

auto op_project_batched(const Table& t, const Udf& fn, std::size_t batch_size) -> Table {
    if (batch_size == 0) {
        throw Error("batch size must be at least 1");
    }
    const auto& rows = t.rows();
    std::size_t n_chunks = (rows.size() + batch_size - 1) / batch_size;
    std::vector<ValueList> outputs(n_chunks);
    std::vector<std::exception_ptr> errors(n_chunks);

    auto run_chunk = [&](std::size_t c) {
        std::size_t first = c * batch_size;
        std::size_t len = std::min(batch_size, rows.size() - first);
        try {
            outputs[c] = project_chunk(fn, std::span<const Value>(rows).subspan(first, len), first);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };

    std::size_t workers = std::min<std::size_t>(std::thread::hardware_concurrency(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            run_chunk(c);
        }
    } else {
        std::vector<std::future<void>> futures;
        futures.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t c = w; c < n_chunks; c += workers) {
                    run_chunk(c);
                }
            }));
        }
        for (auto& f : futures) {
            f.get();
        }
    }

    // Report the earliest failing chunk so results match sequential execution.
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    ValueList out;
    out.reserve(rows.size());
    for (auto& chunk : outputs) {
        std::move(chunk.begin(), chunk.end(), std::back_inserter(out));
    }
    return Table(std::move(out));
}

auto op_filter(const Table& t, const Udf& pred) -> Table {
    ValueList out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Value keep = guarded(i, [&] { return pred(t[i]); });
        if (!keep.is_bool()) {
            throw PredicateTypeError(UdfError::npos, i,
                                     "filter predicate returned " +
                                         std::string(kind_name(keep.kind())) + ", expected Bool");
        }
        if (keep.as_bool()) {
            out.push_back(t[i]);
        }
    }
    return Table(std::move(out));
}

auto op_order_by(const Table& t, const Udf& key, bool reverse) -> Table {
    ValueList keys;
    keys.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        keys.push_back(guarded(i, [&] { return key(t[i]); }));
    }
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return reverse ? value_compare(keys[b], keys[a]) < 0 : value_compare(keys[a], keys[b]) < 0;
    });
    ValueList out;
    out.reserve(t.size());
    for (std::size_t i : order) {
        out.push_back(t[i]);
    }
    return Table(std::move(out));
}

auto op_group_by(const Table& t, const Udf& key) -> Table {
    // Groups in first-occurrence order of their key.
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<Value> group_keys;
    std::vector<ValueList> members;
    std::string scratch;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Value k = guarded(i, [&] { return key(t[i]); });
        scratch.clear();
        canonical_encode_into(k, scratch);
        auto [it, inserted] = slot.try_emplace(scratch, group_keys.size());
        if (inserted) {
            group_keys.push_back(std::move(k));
            members.emplace_back();
        }
        members[it->second].push_back(t[i]);
    }
    ValueList out;
    out.reserve(group_keys.size());
    for (std::size_t g = 0; g < group_keys.size(); ++g) {
        out.push_back(Value::list({group_keys[g], Value::list(std::move(members[g]))}));
    }
    return Table(std::move(out));
}

auto op_flatten(const Table& t) -> Table {
    ValueList out;
    out.reserve(t.size());
    for (const auto& row : t) {
        if (row.is_list() || row.is_set()) {
            const auto& items = row.items();
            out.insert(out.end(), items.begin(), items.end());
        } else {
            out.push_back(row);
        }
    }
    return Table(std::move(out));
}

auto op_unique(const Table& t) -> Table {
    std::unordered_set<std::string> seen;
    seen.reserve(t.size());
    ValueList out;
    for (const auto& row : t) {
        if (seen.insert(canonical_encode(row).bytes).second) {
            out.push_back(row);
        }
    }
    return Table(std::move(out));
}

auto op_reduce(const Table& t, const Udf& fn) -> Table {
    ReduceResult r = guarded(UdfError::npos, [&] { return fn.apply_table(t); });
    if (auto* table = std::get_if<Table>(&r)) {
        return std::move(*table);
    }
    return Table{std::get<Value>(std::move(r))};
}

auto keeps_join_product(const OperatorSpec& op, bool input_is_join_product) -> bool {
    return std::visit(
        [&](const auto& o) -> bool {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ops::Join>) {
                return true;
            } else if constexpr (std::is_same_v<T, ops::Filter> ||
                                 std::is_same_v<T, ops::OrderBy> ||
                                 std::is_same_v<T, ops::Unique>) {
                return input_is_join_product;
            } else {
                return false;
            }
        },
        op);
}

namespace {

auto apply_op(const Database& db, const OperatorSpec& spec, const Table& in, bool join_product)
    -> Table {
    return std::visit(
        [&](const auto& o) -> Table {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ops::Join>) {
                return op_join(db, in, o.right_name, o.key, o.fkey, join_product);
            } else if constexpr (std::is_same_v<T, ops::Project>) {
                if (o.batch_size) {
                    return op_project_batched(in, o.fn, *o.batch_size);
                }
                return op_project(in, o.fn);
            } else if constexpr (std::is_same_v<T, ops::Filter>) {
                return op_filter(in, o.pred);
            } else if constexpr (std::is_same_v<T, ops::OrderBy>) {
                return op_order_by(in, o.key, o.reverse);
            } else if constexpr (std::is_same_v<T, ops::GroupBy>) {
                return op_group_by(in, o.key);
            } else if constexpr (std::is_same_v<T, ops::Flatten>) {
                return op_flatten(in);
            } else if constexpr (std::is_same_v<T, ops::Unique>) {
                return op_unique(in);
            } else {
                return op_reduce(in, o.fn);
            }
        },
        spec);
}

}  // namespace

auto eval_query(const Database& db, const QueryPlan& plan, bool profile) -> QueryResult {
    auto start = Clock::now();
    auto base = db.find(plan.base());
    if (!base) {
        throw UnknownTable(plan.base());
    }
    for (const auto& op : plan.ops()) {
        if (const auto* join = std::get_if<ops::Join>(&op); join && !db.contains(join->right_name)) {
            throw UnknownTable(join->right_name);
        }
    }

    QueryResult result;
    if (profile) {
        result.profile.emplace();
    }
    const Table* current = base.get();
    Table owned;
    bool join_product = false;
    for (std::size_t i = 0; i < plan.ops().size(); ++i) {
        const auto& op = plan.ops()[i];
        auto op_start = Clock::now();
        Table next;
        try {
            next = apply_op(db, op, *current, join_product);
        } catch (UdfError& e) {
            e.set_op_index(i);
            throw;
        }
        if (profile) {
            result.profile->entries.push_back(
                {std::string(op_name(op)), current->size(), next.size(), seconds_since(op_start)});
        }
        join_product = keeps_join_product(op, join_product);
        owned = std::move(next);
        current = &owned;
    }
    result.table = plan.ops().empty() ? *base : std::move(owned);
    if (profile) {
        result.profile->total_seconds = seconds_since(start);
    }
    return result;
}

auto eval_program(const Database& db, const Program& program) -> Database {
    return eval_program(db, program, nullptr);
}

auto eval_program(const Database& db, const Program& program,
                  std::vector<NamedProfile>* profiles) -> Database {
    Database next = db;
    for (std::size_t i = 0; i < program.size(); ++i) {
        try {
            std::visit(
                [&](const auto& stmt) {
                    using T = std::decay_t<decltype(stmt)>;
                    if constexpr (std::is_same_v<T, RegisterStmt>) {
                        next.put(stmt.name, stmt.table, stmt.overwrite);
                    } else {
                        auto r = eval_query(next, stmt.plan, profiles != nullptr);
                        if (profiles) {
                            profiles->push_back({stmt.name, std::move(*r.profile)});
                        }
                        next.put(stmt.name, std::move(r.table), true);
                    }
                },
                program[i]);
        } catch (Error& e) {
            e.set_statement_index(i);
            throw;
        }
    }
    return next;
}

}  // namespace objql
