#pragma once

// Random values, tables and plans for property and differential tests.

#include <objql/engine.hpp>
#include <objql/value.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace objql::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    auto below(std::uint64_t n) -> std::uint64_t { return rng_() % n; }
    auto chance(double p) -> bool { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
    auto engine() -> std::mt19937_64& { return rng_; }

    auto scalar() -> Value {
        switch (below(7)) {
            case 0: return Value();
            case 1: return Value(chance(0.5));
            case 2: return Value(static_cast<std::int64_t>(below(7)) - 3);
            case 3: {
                static const double specials[] = {0.0, -0.0, 1.5, -2.0, 3.0,
                                                  std::numeric_limits<double>::quiet_NaN(),
                                                  std::numeric_limits<double>::infinity(), 0.1};
                return Value(specials[below(8)]);
            }
            case 4: return Value(static_cast<double>(below(5)) - 2.0);
            case 5: {
                static const char* words[] = {"", "a", "b", "ab", "person", "\xc3\xa9"};
                return Value(words[below(6)]);
            }
            default: return Value(static_cast<std::int64_t>(below(3)));
        }
    }

    auto value(int depth = 4) -> Value {
        if (depth <= 0 || chance(0.55)) {
            return scalar();
        }
        std::size_t n = below(4);
        switch (below(3)) {
            case 0: {
                ValueList xs;
                for (std::size_t i = 0; i < n; ++i) {
                    xs.push_back(value(depth - 1));
                }
                return Value::list(std::move(xs));
            }
            case 1: {
                ValueList xs;
                for (std::size_t i = 0; i < n; ++i) {
                    xs.push_back(value(depth - 1));
                }
                return Value::set(std::move(xs));
            }
            default: {
                std::vector<MapEntry> es;
                for (std::size_t i = 0; i < n; ++i) {
                    Value k = chance(0.7) ? Value(std::string(1, static_cast<char>('a' + below(4))))
                                          : Value(static_cast<std::int64_t>(below(4)));
                    es.emplace_back(std::move(k), value(depth - 1));
                }
                return Value::map(std::move(es));
            }
        }
    }

    /// Record rows {id, a, b, tag, xs} as the fuzzed programs expect.
    auto record(std::int64_t id) -> Value {
        ValueList xs;
        for (std::size_t i = 0, n = below(3); i < n; ++i) {
            xs.emplace_back(static_cast<std::int64_t>(below(4)));
        }
        static const char* tags[] = {"car", "person", "bus"};
        Value b = chance(0.2) ? Value() : chance(0.5) ? Value(static_cast<double>(below(6)) / 2)
                                                      : Value(static_cast<std::int64_t>(below(3)));
        return Value::map({{"id", id},
                           {"a", static_cast<std::int64_t>(below(5))},
                           {"b", b},
                           {"tag", tags[below(3)]},
                           {"xs", Value::list(std::move(xs))}});
    }

    auto records(std::size_t max_rows) -> Table {
        ValueList rows;
        for (std::size_t i = 0, n = below(max_rows + 1); i < n; ++i) {
            rows.push_back(record(static_cast<std::int64_t>(i)));
        }
        return Table(std::move(rows));
    }

    auto table(std::size_t max_rows, int depth = 2) -> Table {
        ValueList rows;
        for (std::size_t i = 0, n = below(max_rows + 1); i < n; ++i) {
            rows.push_back(value(depth));
        }
        return Table(std::move(rows));
    }

private:
    std::mt19937_64 rng_;
};

/// A small Int summary of any value, so pool functions are total.
inline auto probe(const Value& v) -> std::int64_t {
    switch (v.kind()) {
        case Value::Kind::Null: return 0;
        case Value::Kind::Bool: return v.as_bool() ? 1 : 0;
        case Value::Kind::Int: return ((v.as_int() % 5) + 5) % 5;
        case Value::Kind::Float: {
            double d = v.as_float();
            if (!std::isfinite(d)) {
                return 4;
            }
            return ((static_cast<std::int64_t>(std::floor(d)) % 5) + 5) % 5;
        }
        case Value::Kind::Text: return static_cast<std::int64_t>(v.as_text().size() % 5);
        case Value::Kind::List: return v.items().empty() ? 0 : probe(v.items().front());
        case Value::Kind::Set: return static_cast<std::int64_t>(v.items().size() % 5);
        case Value::Kind::Map: {
            if (const Value* a = v.find("a")) {
                return probe(*a);
            }
            return static_cast<std::int64_t>(v.map_entries().size() % 5);
        }
    }
    return 0;
}

enum class PoolRole { Key, Pred, Row, Table };

struct PoolFn {
    const char* name;
    PoolRole role;
    Udf udf;
};

/// Twelve pure functions used by the differential fuzzer.
inline auto udf_pool() -> const std::vector<PoolFn>& {
    static const std::vector<PoolFn> pool = {
        {"key_a", PoolRole::Key, Udf::key([](const Value& r) { return Value(probe(r)); })},
        {"key_parity", PoolRole::Key, Udf::key([](const Value& r) { return Value(probe(r) % 2); })},
        {"key_whole", PoolRole::Key, Udf::key([](const Value& r) { return r; })},
        {"key_tag", PoolRole::Key, Udf::key([](const Value& r) {
             const Value* t = r.is_map() ? r.find("tag") : nullptr;
             return t ? *t : Value(probe(r));
         })},
        {"pred_even", PoolRole::Pred,
         Udf::pred([](const Value& r) { return Value(probe(r) % 2 == 0); })},
        {"pred_small", PoolRole::Pred, Udf::pred([](const Value& r) { return Value(probe(r) < 3); })},
        {"pred_not_null", PoolRole::Pred, Udf::pred([](const Value& r) {
             const Value* b = r.is_map() ? r.find("b") : nullptr;
             return Value(b ? !b->is_null() : !r.is_null());
         })},
        {"row_pair", PoolRole::Row,
         Udf::row([](const Value& r) { return Value::list({Value(probe(r)), r}); })},
        {"row_xs", PoolRole::Row, Udf::row([](const Value& r) {
             const Value* xs = r.is_map() ? r.find("xs") : nullptr;
             return xs ? *xs : Value::list({r});
         })},
        {"row_bump", PoolRole::Row, Udf::row([](const Value& r) {
             return Value::map({{"a", probe(r) + 1}, {"tag", r.is_map() && r.find("tag") ? *r.find("tag") : Value("x")}});
         })},
        {"row_head", PoolRole::Row, Udf::row([](const Value& r) {
             return r.is_list() && !r.items().empty() ? r.items().front() : r;
         })},
        {"table_head", PoolRole::Table, Udf::table([](const Table& t) -> ReduceResult {
             ValueList rows(t.rows().begin(),
                            t.rows().begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, t.size())));
             if (rows.size() % 2 == 1) {
                 return Table(std::move(rows));
             }
             return Value(static_cast<std::int64_t>(t.size()));
         })},
    };
    return pool;
}

inline auto pick(Gen& g, PoolRole role) -> Udf {
    std::vector<const PoolFn*> fs;
    for (const auto& f : udf_pool()) {
        if (f.role == role) {
            fs.push_back(&f);
        }
    }
    return fs[g.below(fs.size())]->udf;
}

inline auto batched(const Udf& row_fn) -> Udf {
    return Udf::batch([row_fn](std::span<const Value> rows) {
        ValueList out;
        for (const auto& r : rows) {
            out.push_back(row_fn(r));
        }
        return out;
    });
}

inline auto random_plan(Gen& g, const std::vector<std::string>& tables,
                        const std::vector<std::string>& base_tables, std::size_t max_ops)
    -> QueryPlan {
    QueryPlan plan(tables[g.below(tables.size())]);
    bool joined = false;
    for (std::size_t i = 0, n = g.below(max_ops + 1); i < n; ++i) {
        switch (g.below(8)) {
            case 0:
                // one join per plan, against a registered table, keeps sizes small
                if (!joined) {
                    plan = plan.join(base_tables[g.below(base_tables.size())],
                                     pick(g, PoolRole::Key), pick(g, PoolRole::Key));
                    joined = true;
                }
                break;
            case 1:
                if (g.chance(0.3)) {
                    plan = plan.project(batched(pick(g, PoolRole::Row)), 1 + g.below(8));
                } else {
                    plan = plan.project(pick(g, PoolRole::Row));
                }
                break;
            case 2: plan = plan.filter(pick(g, PoolRole::Pred)); break;
            case 3: plan = plan.order_by(pick(g, PoolRole::Key), g.chance(0.5)); break;
            case 4: plan = plan.group_by(pick(g, PoolRole::Key)); break;
            case 5: plan = plan.flatten(); break;
            case 6: plan = plan.unique(); break;
            default: plan = plan.reduce(pick(g, PoolRole::Table)); break;
        }
    }
    return plan;
}

/// A few registered tables and up to three query statements.
inline auto random_program(Gen& g, std::size_t max_rows, std::size_t max_ops) -> Program {
    Program prog;
    std::vector<std::string> names;
    for (int i = 0, n = 1 + static_cast<int>(g.below(3)); i < n; ++i) {
        std::string name = "t" + std::to_string(i);
        prog.push_back(RegisterStmt{name, g.records(max_rows), false});
        names.push_back(name);
    }
    const std::vector<std::string> base = names;
    for (int i = 0, n = 1 + static_cast<int>(g.below(3)); i < n; ++i) {
        std::string name = "q" + std::to_string(g.below(3));
        prog.push_back(QueryStmt{name, random_plan(g, names, base, max_ops)});
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            names.push_back(name);
        }
    }
    return prog;
}

inline auto databases_identical(const Database& a, const Database& b) -> bool {
    if (a.names() != b.names()) {
        return false;
    }
    for (const auto& n : a.names()) {
        if (!tables_identical(a.at(n), b.at(n))) {
            return false;
        }
    }
    return true;
}

}  // namespace objql::testing
