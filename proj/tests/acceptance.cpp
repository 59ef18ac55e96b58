// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include "support.hpp"

#include <objql/cli.hpp>
#include <objql/corpus.hpp>
#include <objql/engine.hpp>
#include <objql/ingest.hpp>
#include <objql/qlang/compiler.hpp>
#include <objql/qlang/parser.hpp>
#include <objql/reference.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace objql;
using objql::testing::Gen;
using objql::testing::PoolRole;
using objql::testing::pick;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = OBJQL_CORPUS_DIR;

struct Outcome {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point t0) -> double {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

auto slurp(const fs::path& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto sorted_rows(const Table& t) -> ValueList {
    ValueList rows = t.rows();
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Value& a, const Value& b) { return value_compare(a, b) < 0; });
    return rows;
}

// 1 -----------------------------------------------------------------------

auto differential_fuzz() -> Outcome {
    Gen g(2024);
    int errors_agreed = 0;
    for (int i = 0; i < 1000; ++i) {
        Program p = objql::testing::random_program(g, 24, 6);
        std::optional<Database> a;
        std::optional<Database> b;
        std::string ea;
        std::string eb;
        try {
            a = eval_program(Database{}, p);
        } catch (const Error& e) {
            ea = typeid(e).name();
        }
        try {
            b = reference::ref_eval_program(Database{}, p);
        } catch (const Error& e) {
            eb = typeid(e).name();
        }
        if (a.has_value() != b.has_value() || ea != eb) {
            return {false, "program " + std::to_string(i) + ": error mismatch"};
        }
        if (!a) {
            ++errors_agreed;
            continue;
        }
        if (!objql::testing::databases_identical(*a, *b)) {
            return {false, "program " + std::to_string(i) + ": results differ"};
        }
    }
    return {true, "1000 programs identical (" + std::to_string(errors_agreed) + " raise the same error)"};
}

// 2 -----------------------------------------------------------------------

auto keyed_table(std::size_t n) -> Table {
    ValueList rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back(Value::list({static_cast<std::int64_t>(i), static_cast<std::int64_t>(i % 7)}));
    }
    return Table(std::move(rows));
}

auto median_time(const std::function<void()>& fn) -> double {
    std::vector<double> ts;
    for (int i = 0; i < 5; ++i) {
        auto t0 = Clock::now();
        fn();
        ts.push_back(seconds_since(t0));
    }
    std::sort(ts.begin(), ts.end());
    return ts[2];
}

auto join_scaling() -> Outcome {
    Udf first = Udf::key([](const Value& r) { return r.items()[0]; });
    auto optimized = [&](std::size_t n) {
        Database db;
        db.put("r", keyed_table(n));
        Table left = keyed_table(n);
        return median_time([&] {
            Table out = op_join(db, left, "r", first, first);
            if (out.size() != n) {
                std::abort();
            }
        });
    };
    auto ref = [&](std::size_t n) {
        Table t = keyed_table(n);
        return median_time([&] {
            Table out = reference::ref_join(t, t, first, first);
            if (out.size() != n) {
                std::abort();
            }
        });
    };
    double o1 = optimized(100000);
    double o2 = optimized(200000);
    double r1 = ref(2000);
    double r2 = ref(4000);
    double ro = o2 / o1;
    double rr = r2 / r1;
    std::ostringstream d;
    d.precision(3);
    d << "optimized 100k " << o1 << "s, 200k " << o2 << "s, ratio " << ro << "; reference 2k " << r1
      << "s, 4k " << r2 << "s, ratio " << rr;
    return {ro <= 3.0 && rr >= 3.2, d.str()};
}

// 3 -----------------------------------------------------------------------

auto operator_laws() -> Outcome {
    Gen g(77);
    std::map<std::string, int> cases;
    auto run = [](const Table& t, const QueryPlan& p) {
        Database db;
        db.put("t", t);
        db.put("u", t);
        return eval_query(db, p).table;
    };
    for (int i = 0; i < 250; ++i) {
        Table t = g.records(30);
        Udf p = pick(g, PoolRole::Pred);
        Udf q = pick(g, PoolRole::Pred);
        Udf f = pick(g, PoolRole::Row);
        Udf h = pick(g, PoolRole::Row);
        Udf k = pick(g, PoolRole::Key);
        Udf k2 = pick(g, PoolRole::Key);
        QueryPlan base("t");

        Udf pq = Udf::pred([p, q](const Value& r) { return Value(p(r).as_bool() && q(r).as_bool()); });
        if (!tables_identical(run(t, base.filter(p).filter(q)), run(t, base.filter(pq)))) {
            return {false, "filter fusion, case " + std::to_string(i)};
        }
        ++cases["filter fusion"];

        Udf hf = Udf::row([f, h](const Value& r) { return h(f(r)); });
        if (!tables_identical(run(t, base.project(f).project(h)), run(t, base.project(hf)))) {
            return {false, "project composition, case " + std::to_string(i)};
        }
        ++cases["project composition"];

        Table u = run(t, base.project(f).unique());
        if (!tables_identical(run(t, base.project(f).unique().unique()), u)) {
            return {false, "unique idempotence, case " + std::to_string(i)};
        }
        ++cases["unique idempotence"];

        if (!tables_identical(run(t, base.order_by(k).order_by(k)), run(t, base.order_by(k)))) {
            return {false, "order_by idempotence, case " + std::to_string(i)};
        }
        ++cases["order_by idempotence"];

        if (!tables_identical(run(t, base.order_by(k).filter(p)), run(t, base.filter(p).order_by(k)))) {
            return {false, "filter/order_by commute, case " + std::to_string(i)};
        }
        ++cases["filter/order_by commute"];

        Udf members = Udf::row([](const Value& r) { return r.items()[1]; });
        Table regrouped = run(t, base.group_by(k).project(members).flatten());
        if (sorted_rows(regrouped) != sorted_rows(t)) {
            return {false, "group_by partition, case " + std::to_string(i)};
        }
        ++cases["group_by partition"];

        std::size_t expected = 0;
        for (const auto& l : t) {
            for (const auto& r : t) {
                expected += value_equals(k(l), k2(r));
            }
        }
        if (run(t, base.join("u", k, k2)).size() != expected) {
            return {false, "join cardinality, case " + std::to_string(i)};
        }
        ++cases["join cardinality"];
    }
    std::ostringstream d;
    bool first = true;
    for (const auto& [law, n] : cases) {
        d << (first ? "" : ", ") << law << " " << n;
        first = false;
    }
    return {true, d.str()};
}

// 4 -----------------------------------------------------------------------

auto batched_projection() -> Outcome {
    Gen g(5);
    int checks = 0;
    for (int i = 0; i < 100; ++i) {
        Table t = g.records(60);
        Udf f = pick(g, PoolRole::Row);
        Database db;
        db.put("t", t);
        Table plain = eval_query(db, QueryPlan("t").project(f)).table;
        for (std::size_t bs : {1, 3, 10, 1000}) {
            auto plan = QueryPlan("t").project(objql::testing::batched(f), bs);
            if (!tables_identical(eval_query(db, plan).table, plain) ||
                !tables_identical(reference::ref_eval_query(db, plan), plain)) {
                return {false, "table " + std::to_string(i) + ", batch size " + std::to_string(bs)};
            }
            ++checks;
        }
    }
    return {true, std::to_string(checks) + " table/batch-size pairs equal the row-wise projection"};
}

// 5 -----------------------------------------------------------------------

auto corpus_db() -> Database {
    Database db;
    for (const char* n : {"preds", "series", "labels", "frame_diffs"}) {
        db.put(n, ingest::load_jsonl(kCorpus / "data" / (std::string(n) + ".jsonl")));
    }
    return db;
}

auto field(const Value& row, const char* name) -> const Value& {
    return *row.find(name);
}

auto has_person(const Value& row) -> bool {
    for (const auto& l : field(row, "labels").items()) {
        if (l.as_text() == "person") {
            return true;
        }
    }
    return false;
}

auto successor_join(const QueryPlan& p) -> QueryPlan {
    return p.join(
        "preds",
        Udf::key([](const Value& r) {
            return Value::list({field(r, "seq_id"), field(r, "frame_id").as_int() + 1});
        }),
        Udf::key([](const Value& r) { return Value::list({field(r, "seq_id"), field(r, "frame_id")}); }));
}

using HostQuery = std::function<Table(const Database&)>;

auto host_queries() -> std::map<std::string, std::pair<std::string, HostQuery>> {
    using corpus::kNoMatch;
    std::map<std::string, std::pair<std::string, HostQuery>> m;
    m["temporal_consistency"] = {"temporal_consistency", corpus::q_temporal_consistency};
    m["high_velocity"] = {"high_velocity", [](const Database& db) { return corpus::q_high_velocity(db); }};
    m["iqr_outliers_observed"] = {"iqr_outliers",
                                  [](const Database& db) { return corpus::q_iqr_outliers(db, false); }};
    m["iqr_outliers_all"] = {"iqr_outliers", [](const Database& db) { return corpus::q_iqr_outliers(db, true); }};
    m["multilabel_sequences"] = {"multilabel_sequences", corpus::q_multilabel_sequences};
    m["empty_frame_mislabels"] = {"empty_frame_mislabels",
                                  [](const Database& db) { return corpus::q_empty_frame_mislabels(db); }};
    m["people_frames"] = {"people_frames", [](const Database& db) {
        auto plan = QueryPlan("preds")
                        .filter(Udf::pred([](const Value& r) { return Value(has_person(r)); }))
                        .project(Udf::row([](const Value& r) {
                            return Value::list({field(r, "seq_id"), field(r, "frame_id")});
                        }));
        return eval_query(db, plan).table;
    }};
    m["changing_people"] = {"changing_people", [](const Database& db) {
        auto plan = successor_join(QueryPlan("preds"))
                        .filter(Udf::pred([](const Value& r) {
                            return Value(has_person(r.items()[0]) != has_person(r.items()[1]));
                        }))
                        .project(Udf::row([](const Value& r) {
                            const Value& a = r.items()[0];
                            return Value::list({field(a, "seq_id"), field(a, "frame_id"),
                                                field(r.items()[1], "frame_id")});
                        }));
        return eval_query(db, plan).table;
    }};
    m["label_histogram"] = {"label_histogram", [](const Database& db) {
        auto plan = QueryPlan("preds")
                        .project(Udf::row([](const Value& r) { return field(r, "labels"); }))
                        .flatten()
                        .group_by(Udf::key([](const Value& r) { return r; }))
                        .project(Udf::row([](const Value& r) {
                            return Value::list({r.items()[0], static_cast<std::int64_t>(r.items()[1].items().size())});
                        }))
                        .order_by(Udf::key([](const Value& r) { return r.items()[1]; }), true);
        return eval_query(db, plan).table;
    }};
    m["series_stats"] = {"series_stats", [](const Database& db) {
        auto plan = QueryPlan("series")
                        .filter(Udf::pred([](const Value& r) { return Value(!field(r, "value").is_null()); }))
                        .group_by(Udf::key([](const Value& r) { return field(r, "feature"); }))
                        .project(Udf::row([](const Value& r) {
                            double s = 0;
                            const auto& rows = r.items()[1].items();
                            for (const auto& x : rows) {
                                s += field(x, "value").as_number();
                            }
                            auto n = static_cast<std::int64_t>(rows.size());
                            return Value::map({{"feature", r.items()[0]},
                                               {"mean", s / static_cast<double>(n)},
                                               {"n", n}});
                        }))
                        .order_by(Udf::key([](const Value& r) { return field(r, "feature"); }));
        return eval_query(db, plan).table;
    }};
    m["unique_labels"] = {"unique_labels", [](const Database& db) {
        auto plan = QueryPlan("labels")
                        .project(Udf::row([](const Value& r) { return field(r, "label"); }))
                        .unique()
                        .order_by(Udf::key([](const Value& r) { return r; }));
        return eval_query(db, plan).table;
    }};
    m["speed_stats"] = {"speed_p99", [](const Database& db) {
        auto plan = corpus::temporal_matches_plan()
                        .filter(Udf::pred([](const Value& r) {
                            return Value(!value_equals(r.items()[2].items()[1], Value(std::string(kNoMatch))));
                        }))
                        .project(Udf::row([](const Value& r) {
                            const auto& boxes = r.items()[3].items();
                            return Value(corpus::center_distance(corpus::box_from_value(boxes[0]),
                                                                 corpus::box_from_value(boxes[1])));
                        }))
                        .reduce(Udf::table([](const Table& t) -> ReduceResult {
                            std::vector<double> xs;
                            for (const auto& v : t) {
                                xs.push_back(v.as_number());
                            }
                            return Value(qlang::linear_quantile(std::move(xs), 0.99));
                        }));
        return eval_query(db, plan).table;
    }};
    return m;
}

auto line_col_offset(const std::string& text, SourcePos pos) -> std::size_t {
    std::size_t off = 0;
    for (int line = 1; line < pos.line; ++line) {
        off = text.find('\n', off) + 1;
    }
    return off + static_cast<std::size_t>(pos.col - 1);
}

auto token_index_at(const std::vector<qlang::Token>& toks, SourcePos pos) -> std::size_t {
    std::size_t best = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        auto p = toks[i].pos;
        if (p.line < pos.line || (p.line == pos.line && p.col <= pos.col)) {
            best = i;
        }
    }
    return best;
}

struct Corruption {
    std::string text;
    SourcePos at;
};

// Each kind breaks the script at one token; `at` is where that token lands.
auto corrupt(const std::string& src, int kind) -> std::optional<Corruption> {
    auto toks = qlang::tokenize(src);
    auto find_tok = [&](auto pred) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
            if (pred(i)) {
                return i;
            }
        }
        return std::nullopt;
    };
    auto lex = [&](std::size_t i) { return toks[i].lexeme; };
    std::string text = src;
    switch (kind) {
        case 0: {  // misspelt operator
            auto i = find_tok([&](std::size_t i) {
                return i > 0 && lex(i - 1) == "." && toks[i].kind == qlang::TokenKind::Keyword &&
                       lex(i + 1) == "(";
            });
            if (!i) return std::nullopt;
            text.insert(line_col_offset(src, toks[*i].pos) + lex(*i).size(), "q");
            return Corruption{text, toks[*i].pos};
        }
        case 1: {  // missing arrow
            auto i = find_tok([&](std::size_t i) { return lex(i) == "<-"; });
            if (!i) return std::nullopt;
            text.erase(line_col_offset(src, toks[*i].pos), 2);
            return Corruption{text, toks[*i].pos};
        }
        case 2: {  // stray closing paren after an operator's open paren
            auto i = find_tok([&](std::size_t i) { return i > 1 && lex(i) == "(" && lex(i - 2) == "."; });
            if (!i) return std::nullopt;
            SourcePos p = toks[*i].pos;
            text.insert(line_col_offset(src, p) + 1, ")");
            return Corruption{text, {p.line, p.col + 1}};
        }
        case 3: {  // doubled dot
            auto i = find_tok([&](std::size_t i) { return lex(i) == "."; });
            if (!i) return std::nullopt;
            SourcePos p = toks[*i].pos;
            text.insert(line_col_offset(src, p), ".");
            return Corruption{text, {p.line, p.col + 1}};
        }
        default: {  // unknown builtin in place of the first call in an argument
            auto i = find_tok([&](std::size_t i) {
                return i > 0 && lex(i - 1) != "." && toks[i].kind == qlang::TokenKind::Ident && lex(i + 1) == "(";
            });
            if (!i) return std::nullopt;
            text.insert(line_col_offset(src, toks[*i].pos), "no_such_");
            return Corruption{text, toks[*i].pos};
        }
    }
}

auto corpus_scripts() -> Outcome {
    Database db = corpus_db();
    auto hosts = host_queries();
    qlang::CompileOptions opts{kCorpus / "data", &corpus::builtins()};
    int equal = 0;
    int located = 0;
    int script_no = 0;
    std::vector<fs::path> scripts;
    for (const auto& e : fs::directory_iterator(kCorpus)) {
        if (e.path().extension() == ".tql") {
            scripts.push_back(e.path());
        }
    }
    std::sort(scripts.begin(), scripts.end());
    for (const auto& path : scripts) {
        std::string stem = path.stem().string();
        std::string src = slurp(path);
        auto it = hosts.find(stem);
        if (it == hosts.end()) {
            return {false, stem + ": no host plan"};
        }
        auto compiled = qlang::compile_script(src, opts);
        Database out = eval_program(Database{}, compiled.program);
        Table host = it->second.second(db);
        if (!tables_identical(out.at(it->second.first), host)) {
            return {false, stem + ": script differs from the host plan"};
        }
        ++equal;

        int kind = script_no++ % 5;
        auto bad = corrupt(src, kind);
        if (!bad) {
            return {false, stem + ": corruption " + std::to_string(kind) + " not applicable"};
        }
        auto toks = qlang::tokenize(bad->text);
        try {
            qlang::compile_script(bad->text, opts);
            return {false, stem + ": corrupted script compiled"};
        } catch (const SourceError& e) {
            auto want = token_index_at(toks, bad->at);
            auto got = token_index_at(toks, e.pos());
            if ((got > want ? got - want : want - got) > 1) {
                return {false, stem + ": error at token " + std::to_string(got) + ", corruption at " +
                                   std::to_string(want) + " (" + e.what() + ")"};
            }
            ++located;
        }
    }
    return {equal >= 10 && located >= 10, std::to_string(equal) + " scripts equal their host plans, " +
                                              std::to_string(located) + " corruptions located within one token"};
}

// 6 -----------------------------------------------------------------------

auto oracle_quantile(std::vector<double> xs, double p) -> double {
    std::sort(xs.begin(), xs.end());
    double h = p * static_cast<double>(xs.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

auto iqr_oracle() -> Outcome {
    Gen g(13);
    std::normal_distribution<double> normal(37.0, 0.6);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> xs(1 + g.below(200));
        for (auto& x : xs) {
            x = normal(g.engine());
        }
        double q1 = oracle_quantile(xs, 0.25);
        double q3 = oracle_quantile(xs, 0.75);
        auto [lo, hi] = corpus::iqr_bounds(xs);
        if (std::abs(lo - (q1 - 1.5 * (q3 - q1))) > 1e-9 || std::abs(hi - (q3 + 1.5 * (q3 - q1))) > 1e-9) {
            return {false, "series " + std::to_string(i)};
        }
    }
    std::vector<double> temps{37.0, 37.47, 37.6, 38.07, 38.5};
    auto b = corpus::iqr_bounds(temps);
    bool micro = std::abs(b.second - 38.97) < 1e-9 && corpus::outside_bounds(38.98, b) &&
                 !corpus::outside_bounds(38.92, b);
    std::ostringstream d;
    d.precision(6);
    d << "100 series within 1e-9; fixture upper bound " << b.second;
    return {micro, d.str()};
}

// 7 -----------------------------------------------------------------------

auto suite_scores() -> Outcome {
    auto t0 = Clock::now();
    auto report = corpus::run_suite(corpus::SuiteConfig{});
    double secs = seconds_since(t0);
    std::ostringstream d;
    bool ok = secs < 60.0;
    for (const auto& s : report.scores) {
        ok = ok && s.precision == 1.0 && s.recall == 1.0 && s.truth > 0;
        d << s.name << " " << s.hits << "/" << s.truth << ", ";
    }
    d.precision(3);
    d << secs << "s";
    return {ok, d.str()};
}

// 8 -----------------------------------------------------------------------

auto persistence() -> Outcome {
    fs::path dir = fs::temp_directory_path() / "objql_acceptance_persist";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "t.jsonl") << "{\"k\": 1, \"v\": \"a\"}\n{\"k\": 2, \"v\": \"b\"}\n{\"k\": 2, \"v\": \"c\"}\n";
    std::string script =
        "register t \"t.jsonl\";\n"
        "keys <- t.project(it.k).unique();\n"
        "pairs <- keys.join(t, key=it, fkey=it.k);\n"
        "counts <- pairs.group_by(_0).project([it[0], len(it[1])]);\n";
    std::ofstream(dir / "s.tql") << script;

    auto compiled = qlang::compile_script(script, {dir, nullptr});
    Database db = eval_program(Database{}, compiled.program);
    if (db.names() != std::vector<std::string>{"counts", "keys", "pairs", "t"}) {
        return {false, "program database holds the wrong names"};
    }
    if (!tables_identical(db.at("counts"), Table{Value::list({1, 1}), Value::list({2, 2})})) {
        return {false, "counts: " + to_string(db.at("counts"))};
    }
    std::ostringstream o, e;
    for (const char* out : {"out1", "out2"}) {
        cli::RunConfig cfg{dir / "s.tql", dir, dir / out, cli::Engine::Optimized, false, std::nullopt};
        if (cli::cmd_run(cfg, o, e) != cli::kOk) {
            return {false, "run failed: " + e.str()};
        }
    }
    cli::RunConfig ref{dir / "s.tql", dir, dir / "out3", cli::Engine::Reference, false, std::nullopt};
    cli::cmd_run(ref, o, e);
    for (const char* n : {"keys.jsonl", "pairs.jsonl", "counts.jsonl"}) {
        std::string a = slurp(dir / "out1" / n);
        if (a.empty() || a != slurp(dir / "out2" / n) || a != slurp(dir / "out3" / n)) {
            return {false, std::string(n) + " differs between runs"};
        }
    }
    return {true, "3 statements persisted; reruns and the reference engine write identical files"};
}

// 9 -----------------------------------------------------------------------

auto profiling() -> Outcome {
    Gen g(99);
    Database db;
    db.put("t", g.records(3000));
    auto plan = QueryPlan("t")
                    .join("t", Udf::key([](const Value& r) { return *r.find("id"); }),
                          Udf::key([](const Value& r) { return *r.find("id"); }))
                    .project(Udf::row([](const Value& r) { return r.items()[0]; }))
                    .filter(pick(g, PoolRole::Pred))
                    .order_by(Udf::key([](const Value& r) { return *r.find("a"); }))
                    .group_by(Udf::key([](const Value& r) { return *r.find("tag"); }))
                    .project(Udf::row([](const Value& r) { return r.items()[1]; }))
                    .flatten()
                    .unique()
                    .reduce(Udf::table([](const Table& t) -> ReduceResult { return Value(static_cast<std::int64_t>(t.size())); }));
    auto t0 = Clock::now();
    auto res = eval_query(db, plan, true);
    double wall = seconds_since(t0);
    if (!res.profile) {
        return {false, "no profile"};
    }
    std::set<std::string> seen;
    for (const auto& e : res.profile->entries) {
        seen.insert(e.op);
    }
    std::set<std::string> want{"join", "project", "filter", "order_by", "group_by", "flatten", "unique", "reduce"};
    double ops = res.profile->operator_seconds();
    std::ostringstream d;
    d.precision(3);
    d << seen.size() << " operator kinds, operator sum " << ops << "s <= query " << res.profile->total_seconds
      << "s <= wall " << wall << "s";
    bool ok = seen == want && res.profile->entries.size() == plan.ops().size() &&
              ops <= res.profile->total_seconds && res.profile->total_seconds <= wall;
    return {ok, d.str()};
}

}  // namespace

int main() {
    ::setenv("OBJQL_COLOR", "0", 1);
    struct Criterion {
        const char* name;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {"differential fuzz vs reference", differential_fuzz},
        {"join scaling", join_scaling},
        {"operator laws", operator_laws},
        {"batched projection", batched_projection},
        {"corpus scripts and error positions", corpus_scripts},
        {"iqr bounds oracle", iqr_oracle},
        {"constraint suite precision/recall", suite_scores},
        {"program persistence", persistence},
        {"profiling", profiling},
    };
    int failed = 0;
    int n = 0;
    for (const auto& c : criteria) {
        ++n;
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << n << " " << c.name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
