#include <objql/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace objql::cli;
    CLI::App app{"objql: integrity constraints over in-memory tables"};
    app.require_subcommand(1);

    RunConfig run;
    std::string engine = "optimized";
    std::uint64_t run_seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run a .tql script and write every query result");
    run_cmd->add_option("script", run.script)->required();
    run_cmd->add_option("--data", run.data_dir)->required();
    run_cmd->add_option("--out", run.out_dir)->required();
    run_cmd->add_option("--engine", engine)->check(CLI::IsMember({"optimized", "reference"}));
    run_cmd->add_flag("--profile", run.profile, "write profile.txt");
    auto* seed_opt = run_cmd->add_option("--seed", run_seed, "regenerate corpus datasets first");

    std::filesystem::path repl_data;
    auto* repl_cmd = app.add_subcommand("repl", "interactive session");
    repl_cmd->add_option("--data", repl_data)->required();

    BenchConfig bench;
    auto* bench_cmd = app.add_subcommand("bench", "compare optimized and reference engines");
    bench_cmd->add_option("script", bench.script)->required();
    bench_cmd->add_option("--data", bench.data_dir)->required();
    bench_cmd->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--ref-cap", bench.ref_cap, "row cap for reference engine inputs");

    std::filesystem::path gen_dir;
    std::uint64_t gen_seed = 7;
    auto* gen_cmd = app.add_subcommand("gen", "write the synthetic corpus datasets");
    gen_cmd->add_option("dir", gen_dir)->required();
    gen_cmd->add_option("--seed", gen_seed);

    std::uint64_t suite_seed = 7;
    std::string suite_jsonl;
    auto* suite_cmd = app.add_subcommand("suite", "score every constraint against injected faults");
    suite_cmd->add_option("--seed", suite_seed);
    suite_cmd->add_option("--jsonl", suite_jsonl, "also write the report as JSON lines");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        run.engine = engine == "reference" ? Engine::Reference : Engine::Optimized;
        if (*seed_opt) {
            run.seed = run_seed;
        }
        return cmd_run(run, std::cout, std::cerr);
    }
    if (*repl_cmd) {
        return cmd_repl(repl_data, std::cin, std::cout, std::cerr);
    }
    if (*bench_cmd) {
        return cmd_bench(bench, std::cout, std::cerr);
    }
    if (*gen_cmd) {
        return cmd_gen(gen_dir, gen_seed, std::cout, std::cerr);
    }
    std::optional<std::filesystem::path> jsonl;
    if (!suite_jsonl.empty()) {
        jsonl = suite_jsonl;
    }
    return cmd_suite(suite_seed, jsonl, std::cout, std::cerr);
}
