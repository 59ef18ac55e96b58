#pragma once

#include <objql/engine.hpp>
#include <objql/qlang/ast.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace objql::qlang {

using BuiltinFn = std::function<Value(std::span<const Value>)>;

struct Builtin {
    std::string name;
    std::size_t min_args = 0;
    std::size_t max_args = 0;
    BuiltinFn fn;
};

/// Functions callable from expressions. `core()` holds the standard set;
/// hosts may add domain helpers before compiling.
class BuiltinRegistry {
public:
    static auto core() -> BuiltinRegistry;

    /// Adds or replaces a builtin.
    void add(Builtin b);
    auto find(std::string_view name) const -> const Builtin*;
    auto names() const -> std::vector<std::string>;

private:
    std::map<std::string, Builtin, std::less<>> fns_;
};

/// Linear interpolation between closest ranks: position p*(n-1) in the
/// sorted sample. Throws EvalError on an empty sample or p outside [0, 1].
auto linear_quantile(std::vector<double> xs, double p) -> double;

using CompiledExpr = std::function<Value(const Value& row)>;

/// Closes an expression over a row. Throws CompileError for unknown
/// builtins or wrong argument counts; the result throws EvalError.
auto compile_expr(const ExprPtr& e, const BuiltinRegistry& builtins) -> CompiledExpr;

/// Evaluates against the core builtins.
auto eval_expr(const Expr& e, const Value& row) -> Value;

struct CompileOptions {
    /// Register paths are resolved against this directory.
    std::filesystem::path data_dir = ".";
    /// Defaults to the core set.
    const BuiltinRegistry* builtins = nullptr;
};

struct CompiledProgram {
    Program program;
    /// Source position of each statement, parallel to program.
    std::vector<SourcePos> positions;
    std::vector<std::string> query_names;
};

/// Lowers a script to an engine Program. Register statements load their
/// dataset immediately (format from `as`, else from the file extension).
auto compile_program(const ProgramAst& ast, const CompileOptions& options = {}) -> CompiledProgram;
auto compile_script(std::string_view src, const CompileOptions& options = {}) -> CompiledProgram;

}  // namespace objql::qlang
