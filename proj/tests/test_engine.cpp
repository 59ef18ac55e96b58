#include "support.hpp"

#include <objql/engine.hpp>
#include <objql/reference.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace objql;
using objql::testing::Gen;

namespace {

auto ints(std::initializer_list<std::int64_t> xs) -> Table {
    ValueList rows;
    for (auto x : xs) {
        rows.emplace_back(x);
    }
    return Table(std::move(rows));
}

auto field_key(std::string name) -> Udf {
    return Udf::key([name](const Value& r) { return *r.find(name); });
}

auto identity_key() -> Udf {
    return Udf::key([](const Value& r) { return r; });
}

auto db_with(std::initializer_list<std::pair<std::string, Table>> tables) -> Database {
    Database db;
    for (const auto& [n, t] : tables) {
        db.put(n, t);
    }
    return db;
}

}  // namespace

TEST_CASE("register") {
    Table t = ints({1, 2});
    Database db = db_register(Database{}, "a", t);
    CHECK(db.at("a") == t);
    CHECK_THROWS_AS(db_register(db, "a", t), DuplicateName);
    Database db2 = db_register(db, "a", ints({3}), true);
    CHECK(db2.at("a") == ints({3}));
    CHECK(db.at("a") == t);
    Database db3 = db_register(db, "b", ints({9}));
    CHECK(eval_query(db3, QueryPlan("b")).table == ints({9}));
    CHECK_THROWS_AS(db.at("zzz"), UnknownTable);
}

TEST_CASE("join examples") {
    Table left{Value::map({{"id", 1}, {"x", "a"}}), Value::map({{"id", 2}, {"x", "b"}})};
    Table right{Value::map({{"id", 1}, {"y", 10}}), Value::map({{"id", 3}, {"y", 30}})};
    Database db = db_with({{"r", right}, {"empty", Table{}}});
    Table out = op_join(db, left, "r", field_key("id"), field_key("id"));
    REQUIRE(out.size() == 1);
    CHECK(tables_identical(out, Table{Value::list({left[0], right[0]})}));
    CHECK(op_join(db, left, "empty", field_key("id"), field_key("id")).empty());
    CHECK_THROWS_AS(op_join(db, left, "nope", field_key("id"), field_key("id")), UnknownTable);

    Table dl{Value::map({{"k", 1}, {"s", "l1"}}), Value::map({{"k", 1}, {"s", "l2"}})};
    Table dr{Value::map({{"k", 1.0}, {"s", "r1"}}), Value::map({{"k", 1}, {"s", "r2"}})};
    Database db2 = db_with({{"dr", dr}});
    Table pairs = op_join(db2, dl, "dr", field_key("k"), field_key("k"));
    REQUIRE(pairs.size() == 4);
    CHECK(tables_identical(pairs, Table{Value::list({dl[0], dr[0]}), Value::list({dl[0], dr[1]}),
                                        Value::list({dl[1], dr[0]}), Value::list({dl[1], dr[1]})}));
}

TEST_CASE("chained joins build flat tuples") {
    Table t = ints({1, 2, 3});
    Database db = db_with({{"t", t}});
    auto next = Udf::key([](const Value& r) { return Value(r.as_int() + 1); });
    auto head_next2 = Udf::args(UdfKind::Key, [](std::span<const Value> a) {
        return Value(a[0].as_int() + 2);
    });
    auto plan = QueryPlan("t").join("t", next, identity_key()).join("t", head_next2, identity_key());
    Table out = eval_query(db, plan).table;
    CHECK(tables_identical(out, Table{Value::list({1, 2, 3})}));
    // project clears the join-product flag: the next join nests
    auto plan2 = QueryPlan("t")
                     .join("t", next, identity_key())
                     .project(Udf::row([](const Value& r) { return r; }))
                     .join("t", Udf::key([](const Value& r) { return Value(r.items()[0].as_int() + 2); }),
                           identity_key());
    Table nested = eval_query(db, plan2).table;
    CHECK(tables_identical(nested, Table{Value::list({Value::list({1, 2}), 3})}));
}

TEST_CASE("project, filter, order_by examples") {
    auto square = Udf::row([](const Value& r) { return Value(r.as_int() * r.as_int()); });
    CHECK(op_project(Table{}, square).empty());
    CHECK(op_project(ints({1, 2, 3}), square) == ints({1, 4, 9}));
    CHECK(op_project(ints({1, 2, 3}), Udf::row([](const Value& r) { return r; })) == ints({1, 2, 3}));

    auto even = Udf::pred([](const Value& r) { return Value(r.as_int() % 2 == 0); });
    CHECK(op_filter(ints({1, 2, 3, 4}), even) == ints({2, 4}));
    CHECK(op_filter(ints({1, 2}), Udf::pred([](const Value&) { return Value(true); })) == ints({1, 2}));
    CHECK(op_filter(ints({1, 2}), Udf::pred([](const Value&) { return Value(false); })).empty());
    CHECK_THROWS_AS(op_filter(ints({1}), Udf::pred([](const Value&) { return Value(1); })),
                    PredicateTypeError);

    Table rows{Value::list({3, "a"}), Value::list({1, "b"}), Value::list({3, "c"}), Value::list({2, "d"})};
    auto first = Udf::key([](const Value& r) { return r.items()[0]; });
    auto payloads = [](const Table& t) {
        std::string s;
        for (const auto& r : t) {
            s += r.items()[1].as_text();
        }
        return s;
    };
    CHECK(payloads(op_order_by(rows, first)) == "bdac");
    CHECK(payloads(op_order_by(rows, first, true)) == "acdb");
    CHECK(op_order_by(ints({1, 2, 3}), identity_key()) == ints({1, 2, 3}));
    CHECK(op_order_by(Table{}, identity_key()).empty());
}

TEST_CASE("group_by, flatten, unique, reduce examples") {
    Table g = op_group_by(ints({1, 2, 1, 3}), identity_key());
    CHECK(tables_identical(g, Table{Value::list({1, Value::list({1, 1})}),
                                    Value::list({2, Value::list({2})}),
                                    Value::list({3, Value::list({3})})}));
    CHECK(op_group_by(Table{}, identity_key()).empty());
    Table one = op_group_by(ints({5, 6}), Udf::key([](const Value&) { return Value("k"); }));
    CHECK(tables_identical(one, Table{Value::list({"k", Value::list({5, 6})})}));

    CHECK(tables_identical(op_flatten(Table{Value::list({1, 2}), 3, Value::list({4})}), ints({1, 2, 3, 4})));
    CHECK(tables_identical(op_flatten(Table{Value::list({Value::list({1, 2})}), Value::list({3})}),
                           Table{Value::list({1, 2}), 3}));
    CHECK(tables_identical(op_flatten(Table{Value::set({2, 1})}), ints({1, 2})));

    CHECK(op_unique(ints({1, 2, 1, 3, 2})) == ints({1, 2, 3}));
    double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(op_unique(Table{nan, nan}).size() == 1);

    auto sum = Udf::table([](const Table& t) -> ReduceResult {
        std::int64_t s = 0;
        for (const auto& r : t) {
            s += r.as_int();
        }
        return Value(s);
    });
    CHECK(op_reduce(ints({1, 2, 3}), sum) == ints({6}));
    auto count = Udf::table([](const Table& t) -> ReduceResult { return Value(static_cast<std::int64_t>(t.size())); });
    CHECK(op_reduce(Table{}, count) == ints({0}));
    auto id = Udf::table([](const Table& t) -> ReduceResult { return t; });
    CHECK(op_reduce(ints({4, 5}), id) == ints({4, 5}));
}

TEST_CASE("batched projection") {
    std::vector<std::size_t> chunks;
    std::mutex m;
    auto fn = Udf::batch([&](std::span<const Value> rows) {
        {
            std::lock_guard lock(m);
            chunks.push_back(rows.size());
        }
        ValueList out;
        for (const auto& r : rows) {
            out.emplace_back(r.as_int() * 10);
        }
        return out;
    });
    Table t = ints({1, 2, 3, 4, 5, 6, 7});
    CHECK(op_project_batched(t, fn, 3) == ints({10, 20, 30, 40, 50, 60, 70}));
    std::sort(chunks.begin(), chunks.end());
    CHECK(chunks == std::vector<std::size_t>{1, 3, 3});

    auto bad = Udf::batch([](std::span<const Value> rows) { return ValueList(rows.size() + 1); });
    CHECK_THROWS_AS(op_project_batched(t, bad, 2), BatchArityError);
}

TEST_CASE("udf errors carry positions") {
    Database db = db_with({{"t", ints({1, 2, 0, 4})}});
    auto inv = Udf::row([](const Value& r) {
        if (r.as_int() == 0) {
            throw std::runtime_error("zero");
        }
        return Value(1.0 / static_cast<double>(r.as_int()));
    });
    auto plan = QueryPlan("t").filter(Udf::pred([](const Value&) { return Value(true); })).project(inv);
    try {
        eval_query(db, plan);
        FAIL("expected UdfError");
    } catch (const UdfError& e) {
        CHECK(e.op_index() == 1);
        CHECK(e.row_index() == 2);
        CHECK(std::string(e.what()).find("zero") != std::string::npos);
    }
    CHECK_THROWS_AS(eval_query(db, QueryPlan("nope")), UnknownTable);
}

TEST_CASE("programs are transactional and persist names") {
    Database db;
    Program p{RegisterStmt{"a", ints({1, 2, 3}), false},
              QueryStmt{"b", QueryPlan("a").filter(Udf::pred([](const Value& r) { return Value(r.as_int() > 1); }))},
              QueryStmt{"c", QueryPlan("b").join("a", identity_key(), identity_key())}};
    Database out = eval_program(db, p);
    CHECK(out.names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(out.at("b") == ints({2, 3}));
    // fused form of b then c
    auto fused = QueryPlan("a")
                     .filter(Udf::pred([](const Value& r) { return Value(r.as_int() > 1); }))
                     .join("a", identity_key(), identity_key());
    CHECK(tables_identical(out.at("c"), eval_query(out, fused).table));
    CHECK(eval_program(db, Program{}) == db);

    Program bad = p;
    bad.push_back(RegisterStmt{"a", ints({9}), false});
    try {
        eval_program(db, bad);
        FAIL("expected DuplicateName");
    } catch (const DuplicateName& e) {
        CHECK(e.statement_index() == 3u);
    }
    CHECK(db.size() == 0);

    Program rebind{RegisterStmt{"a", ints({1}), false}, QueryStmt{"a", QueryPlan("a").project(Udf::row([](const Value& r) { return Value(r.as_int() + 1); }))}};
    CHECK(eval_program(db, rebind).at("a") == ints({2}));
}

TEST_CASE("join cardinality matches key classes") {
    Gen g(21);
    for (int i = 0; i < 100; ++i) {
        Table l = g.records(30);
        Table r = g.records(30);
        Database db = db_with({{"r", r}});
        auto key = objql::testing::pick(g, objql::testing::PoolRole::Key);
        auto fkey = objql::testing::pick(g, objql::testing::PoolRole::Key);
        std::size_t expect = 0;
        for (const auto& a : l) {
            for (const auto& b : r) {
                expect += value_equals(key(a), fkey(b));
            }
        }
        Table out = op_join(db, l, "r", key, fkey);
        CHECK(out.size() == expect);
        CHECK(tables_identical(out, reference::ref_join(l, r, key, fkey)));
    }
}

TEST_CASE("profiling") {
    Database db = db_with({{"t", ints({1, 2, 3, 4})}});
    auto plan = QueryPlan("t")
                    .filter(Udf::pred([](const Value& r) { return Value(r.as_int() > 1); }))
                    .project(Udf::row([](const Value& r) { return r; }))
                    .unique();
    auto res = eval_query(db, plan, true);
    REQUIRE(res.profile);
    const auto& e = res.profile->entries;
    REQUIRE(e.size() == 3);
    CHECK(e[0].op == "filter");
    CHECK(e[0].in_rows == 4);
    CHECK(e[0].out_rows == 3);
    CHECK(e[2].op == "unique");
    CHECK(res.profile->operator_seconds() <= res.profile->total_seconds);
    std::string text = res.profile->render();
    CHECK(text.find("filter") != std::string::npos);
    CHECK(text.find("0.000") != std::string::npos);
    CHECK_FALSE(eval_query(db, plan).profile);
}

TEST_CASE("evaluation is deterministic") {
    Gen g(22);
    for (int i = 0; i < 50; ++i) {
        Program p = objql::testing::random_program(g, 30, 5);
        Database a = eval_program(Database{}, p);
        Database b = eval_program(Database{}, p);
        CHECK(objql::testing::databases_identical(a, b));
    }
}
