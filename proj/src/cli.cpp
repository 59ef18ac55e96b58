#include <objql/cli.hpp>
#include <objql/corpus.hpp>
#include <objql/engine.hpp>
#include <objql/ingest.hpp>
#include <objql/qlang/compiler.hpp>
#include <objql/qlang/parser.hpp>
#include <objql/reference.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace objql::cli {

namespace {

auto read_file(const std::filesystem::path& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto paint(std::string_view text, const char* code) -> std::string {
    if (!use_color()) {
        return std::string(text);
    }
    return std::string("\x1b[") + code + "m" + std::string(text) + "\x1b[0m";
}

void print_error(std::ostream& err, const std::exception& e, const qlang::ProgramAst* ast) {
    std::string where;
    const auto* oe = dynamic_cast<const Error*>(&e);
    if (oe && !dynamic_cast<const SourceError*>(&e) && ast && oe->statement_index() &&
        *oe->statement_index() < ast->statements.size()) {
        SourcePos p = qlang::statement_pos(ast->statements[*oe->statement_index()]);
        where = "line " + std::to_string(p.line) + ", col " + std::to_string(p.col) + ": ";
    }
    err << paint("error", "31") << ": " << where << e.what() << '\n';
}

auto exit_code_for(const std::exception& e) -> int {
    if (dynamic_cast<const MismatchError*>(&e)) {
        return kMismatch;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const DataError*>(&e)) {
        return kIoError;
    }
    return kScriptError;
}

auto compile_options(const std::filesystem::path& data_dir) -> qlang::CompileOptions {
    return {data_dir, &corpus::builtins()};
}

// Final binding of each query name, in first-definition order.
auto distinct_names(const std::vector<std::string>& names) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (seen.insert(n).second) {
            out.push_back(n);
        }
    }
    return out;
}

auto evaluate(Engine engine, const Program& prog, std::vector<NamedProfile>* profiles)
    -> Database {
    if (engine == Engine::Reference) {
        return reference::ref_eval_program(Database{}, prog, profiles);
    }
    return eval_program(Database{}, prog, profiles);
}

}  // namespace

auto use_color() -> bool {
    if (const char* v = std::getenv("OBJQL_COLOR")) {
        return std::string_view(v) == "1";
    }
    return ::isatty(STDERR_FILENO) != 0;
}

auto cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) -> int {
    qlang::ProgramAst ast;
    const qlang::ProgramAst* ast_ptr = nullptr;
    try {
        if (cfg.seed) {
            corpus::SuiteConfig sc;
            sc.seed = *cfg.seed;
            corpus::write_datasets(cfg.data_dir, sc);
        }
        ast = qlang::parse_program(read_file(cfg.script));
        ast_ptr = &ast;
        auto compiled = qlang::compile_program(ast, compile_options(cfg.data_dir));

        std::vector<NamedProfile> profiles;
        Database db = evaluate(cfg.engine, compiled.program, cfg.profile ? &profiles : nullptr);

        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) {
            throw IoError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
        }
        for (const auto& name : distinct_names(compiled.query_names)) {
            ingest::save_jsonl(db.at(name), cfg.out_dir / (name + ".jsonl"));
            out << name << ": " << db.at(name).size() << " rows\n";
        }
        if (cfg.profile) {
            std::ofstream pf(cfg.out_dir / "profile.txt", std::ios::binary);
            if (!pf) {
                throw IoError("cannot write " + (cfg.out_dir / "profile.txt").string());
            }
            for (const auto& p : profiles) {
                pf << "# " << p.name << '\n' << p.report.render() << '\n';
            }
        }
        return kOk;
    } catch (const std::exception& e) {
        print_error(err, e, ast_ptr);
        return exit_code_for(e);
    }
}

auto cmd_repl(const std::filesystem::path& data_dir, std::istream& in, std::ostream& out,
              std::ostream& err) -> int {
    Database db;
    auto opts = compile_options(data_dir);
    std::string line;
    out << "objql> " << std::flush;
    while (std::getline(in, line)) {
        std::istringstream words(line);
        std::string cmd;
        words >> cmd;
        if (cmd.empty() || cmd[0] == '#') {
            // blank or comment
        } else if (cmd == ":quit" || cmd == ":q") {
            return kOk;
        } else if (cmd == ":tables") {
            for (const auto& n : db.names()) {
                out << n << " (" << db.at(n).size() << " rows)\n";
            }
        } else if (cmd == ":show") {
            std::string name;
            long long k = 10;
            words >> name;
            if (!(words >> k)) {
                k = 10;
            }
            if (name.empty()) {
                err << paint("error", "31") << ": usage :show name [k]\n";
            } else if (!db.contains(name)) {
                err << paint("error", "31") << ": unknown table '" << name << "'\n";
            } else {
                const Table& t = db.at(name);
                std::size_t n = std::min<std::size_t>(t.size(), static_cast<std::size_t>(std::max(k, 0LL)));
                for (std::size_t i = 0; i < n; ++i) {
                    out << to_string(t[i]) << '\n';
                }
                if (n < t.size()) {
                    out << "... " << t.size() - n << " more\n";
                }
            }
        } else if (cmd[0] == ':') {
            err << paint("error", "31") << ": unknown command " << cmd << '\n';
        } else {
            qlang::ProgramAst ast;
            const qlang::ProgramAst* ast_ptr = nullptr;
            try {
                ast = qlang::parse_program(line);
                ast_ptr = &ast;
                auto compiled = qlang::compile_program(ast, opts);
                Database next = eval_program(db, compiled.program);
                for (const auto& stmt : compiled.program) {
                    const std::string& name = std::visit([](const auto& s) -> const std::string& { return s.name; }, stmt);
                    out << name << ": " << next.at(name).size() << " rows\n";
                }
                db = std::move(next);
            } catch (const std::exception& e) {
                print_error(err, e, ast_ptr);
            }
        }
        out << "objql> " << std::flush;
    }
    out << '\n';
    return kOk;
}

namespace {

struct Stats {
    double mean = 0;
    double sd = 0;
};

auto stats_of(const std::vector<double>& xs) -> Stats {
    Stats s;
    if (xs.empty()) {
        return s;
    }
    for (double x : xs) {
        s.mean += x;
    }
    s.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) {
        var += (x - s.mean) * (x - s.mean);
    }
    s.sd = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

auto format_stats(const std::vector<double>& xs) -> std::string {
    Stats s = stats_of(xs);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f±%.3f", s.mean, s.sd);
    return buf;
}

// [query][op] -> seconds of each repetition; op index -1 is the whole query.
using Timings = std::map<std::pair<std::size_t, int>, std::vector<double>>;

void record(Timings& t, const std::vector<NamedProfile>& profiles) {
    for (std::size_t q = 0; q < profiles.size(); ++q) {
        const auto& entries = profiles[q].report.entries;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            t[{q, static_cast<int>(i)}].push_back(entries[i].seconds);
        }
        t[{q, -1}].push_back(profiles[q].report.total_seconds);
    }
}

void check_equal(const Database& opt, const Database& ref, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        const Table& a = opt.at(name);
        const Table& b = ref.at(name);
        if (tables_identical(a, b)) {
            continue;
        }
        std::size_t i = 0;
        while (i < a.size() && i < b.size() && value_identical(a[i], b[i])) {
            ++i;
        }
        auto show = [](const Table& t, std::size_t i) {
            return i < t.size() ? to_string(t[i]) : std::string("<no row>");
        };
        throw MismatchError("engines disagree on '" + name + "' at row " + std::to_string(i) +
                            ": optimized " + show(a, i) + ", reference " + show(b, i));
    }
}

}  // namespace

auto cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) -> int {
    qlang::ProgramAst ast;
    const qlang::ProgramAst* ast_ptr = nullptr;
    try {
        ast = qlang::parse_program(read_file(cfg.script));
        ast_ptr = &ast;
        auto compiled = qlang::compile_program(ast, compile_options(cfg.data_dir));
        for (const auto& stmt : compiled.program) {
            if (const auto* r = std::get_if<RegisterStmt>(&stmt)) {
                if (r->table.size() > cfg.ref_cap) {
                    throw DataError(r->name, 0,
                                    std::to_string(r->table.size()) +
                                        " rows exceed the reference engine cap of " +
                                        std::to_string(cfg.ref_cap));
                }
            }
        }
        int reps = std::max(cfg.reps, 1);
        Timings opt_t;
        Timings ref_t;
        Database opt_db;
        Database ref_db;
        std::vector<NamedProfile> shape;
        for (int r = 0; r < reps; ++r) {
            std::vector<NamedProfile> p;
            opt_db = evaluate(Engine::Optimized, compiled.program, &p);
            record(opt_t, p);
            shape = std::move(p);
            std::vector<NamedProfile> q;
            ref_db = evaluate(Engine::Reference, compiled.program, &q);
            record(ref_t, q);
        }
        check_equal(opt_db, ref_db, distinct_names(compiled.query_names));

        char line[200];
        std::snprintf(line, sizeof line, "%-20s %-10s %10s %18s %18s\n", "query", "op", "out_rows",
                      "optimized (s)", "reference (s)");
        out << line;
        for (std::size_t q = 0; q < shape.size(); ++q) {
            const auto& entries = shape[q].report.entries;
            for (std::size_t i = 0; i < entries.size(); ++i) {
                std::pair<std::size_t, int> k{q, static_cast<int>(i)};
                std::snprintf(line, sizeof line, "%-20s %-10s %10zu %18s %18s\n",
                              i == 0 ? shape[q].name.c_str() : "", entries[i].op.c_str(),
                              entries[i].out_rows, format_stats(opt_t[k]).c_str(),
                              format_stats(ref_t[k]).c_str());
                out << line;
            }
            std::pair<std::size_t, int> k{q, -1};
            std::snprintf(line, sizeof line, "%-20s %-10s %10s %18s %18s\n", "", "total", "",
                          format_stats(opt_t[k]).c_str(), format_stats(ref_t[k]).c_str());
            out << line;
        }
        out << "reps " << reps << ", results identical\n";
        return kOk;
    } catch (const std::exception& e) {
        print_error(err, e, ast_ptr);
        return exit_code_for(e);
    }
}

auto cmd_gen(const std::filesystem::path& dir, std::uint64_t seed, std::ostream& out,
             std::ostream& err) -> int {
    try {
        corpus::SuiteConfig cfg;
        cfg.seed = seed;
        corpus::write_datasets(dir, cfg);
        out << "wrote datasets to " << dir.string() << '\n';
        return kOk;
    } catch (const std::exception& e) {
        print_error(err, e, nullptr);
        return exit_code_for(e);
    }
}

auto cmd_suite(std::uint64_t seed, const std::optional<std::filesystem::path>& jsonl,
               std::ostream& out, std::ostream& err) -> int {
    try {
        auto report = corpus::run_suite(seed);
        out << report.render();
        if (jsonl) {
            std::ofstream f(*jsonl, std::ios::binary);
            if (!f) {
                throw IoError("cannot write " + jsonl->string());
            }
            f << report.to_jsonl();
        }
        return kOk;
    } catch (const std::exception& e) {
        print_error(err, e, nullptr);
        return exit_code_for(e);
    }
}

}  // namespace objql::cli
