#pragma once

#include <objql/errors.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace objql::cli {

enum class Engine { Optimized, Reference };

enum ExitCode : int {
    kOk = 0,
    kScriptError = 1,
    kIoError = 2,
    kMismatch = 3,
};

/// Engines disagreed on a query result.
class MismatchError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::filesystem::path script;
    std::filesystem::path data_dir = ".";
    std::filesystem::path out_dir = "out";
    Engine engine = Engine::Optimized;
    bool profile = false;
    /// Regenerates the synthetic corpus datasets into data_dir first.
    std::optional<std::uint64_t> seed;
};

struct BenchConfig {
    std::filesystem::path script;
    std::filesystem::path data_dir = ".";
    int reps = 3;
    /// Largest registered table the reference engine is given.
    std::size_t ref_cap = 10000;
};

/// OBJQL_COLOR=0|1, otherwise whether stderr is a terminal.
auto use_color() -> bool;

auto cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) -> int;
auto cmd_repl(const std::filesystem::path& data_dir, std::istream& in, std::ostream& out,
              std::ostream& err) -> int;
auto cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) -> int;
auto cmd_gen(const std::filesystem::path& dir, std::uint64_t seed, std::ostream& out,
             std::ostream& err) -> int;
auto cmd_suite(std::uint64_t seed, const std::optional<std::filesystem::path>& jsonl,
               std::ostream& out, std::ostream& err) -> int;

}  // namespace objql::cli
