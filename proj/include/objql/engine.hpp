#pragma once

#include <objql/errors.hpp>
#include <objql/value.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace objql {

/// Named-table store. Copies are cheap (tables are shared, never mutated).
class Database {
public:
    auto contains(const std::string& name) const -> bool { return tables_.count(name) != 0; }
    /// Throws UnknownTable.
    auto at(const std::string& name) const -> const Table&;
    auto find(const std::string& name) const -> std::shared_ptr<const Table>;
    auto names() const -> std::vector<std::string>;
    auto size() const -> std::size_t { return tables_.size(); }

    /// Binds name; throws DuplicateName if already bound and !overwrite.
    void put(const std::string& name, Table table, bool overwrite = false);
    void put(const std::string& name, std::shared_ptr<const Table> table, bool overwrite = false);

    friend auto operator==(const Database& a, const Database& b) -> bool;

private:
    std::map<std::string, std::shared_ptr<const Table>> tables_;
};

/// Functional form of registration: returns the extended database.
auto db_register(Database db, const std::string& name, Table table, bool overwrite = false)
    -> Database;

enum class UdfKind { Row, Pred, Key, Batch, Table };
enum class UdfAdapt { WholeRow, Destructure };

/// Result of a table-level (reduce) function.
using ReduceResult = std::variant<Value, Table>;

/// Opaque callable handed to an operator.
///
/// Row, Pred and Key functions map one row to one value. With the
/// Destructure adapter a List row is splatted into positional arguments,
/// mirroring `lambda a, b: ...` over join tuples.
class Udf {
public:
    using RowFn = std::function<Value(const Value&)>;
    using ArgsFn = std::function<Value(std::span<const Value>)>;
    using BatchFn = std::function<ValueList(std::span<const Value>)>;
    using TableFn = std::function<ReduceResult(const Table&)>;

    static auto row(RowFn fn) -> Udf { return Udf(UdfKind::Row, std::move(fn)); }
    static auto pred(RowFn fn) -> Udf { return Udf(UdfKind::Pred, std::move(fn)); }
    static auto key(RowFn fn) -> Udf { return Udf(UdfKind::Key, std::move(fn)); }
    /// Destructuring variants of row/pred/key.
    static auto args(UdfKind kind, ArgsFn fn) -> Udf;
    static auto batch(BatchFn fn) -> Udf;
    static auto table(TableFn fn) -> Udf;

    auto kind() const -> UdfKind { return kind_; }
    auto adapt() const -> UdfAdapt { return adapt_; }

    /// Applies a Row/Pred/Key function to one row.
    auto operator()(const Value& row) const -> Value;
    auto apply_batch(std::span<const Value> rows) const -> ValueList;
    auto apply_table(const Table& t) const -> ReduceResult;

private:
    using Fn = std::variant<RowFn, ArgsFn, BatchFn, TableFn>;
    Udf(UdfKind kind, Fn fn, UdfAdapt adapt = UdfAdapt::WholeRow)
        : kind_(kind), adapt_(adapt), fn_(std::make_shared<const Fn>(std::move(fn))) {}

    UdfKind kind_;
    UdfAdapt adapt_;
    std::shared_ptr<const Fn> fn_;
};

namespace ops {

struct Join {
    std::string right_name;
    Udf key;
    Udf fkey;
};
struct Project {
    Udf fn;
    std::optional<std::size_t> batch_size;
};
struct Filter {
    Udf pred;
};
struct OrderBy {
    Udf key;
    bool reverse = false;
};
struct GroupBy {
    Udf key;
};
struct Flatten {};
struct Unique {};
struct Reduce {
    Udf fn;
};

}  // namespace ops

using OperatorSpec = std::variant<ops::Join, ops::Project, ops::Filter, ops::OrderBy,
                                  ops::GroupBy, ops::Flatten, ops::Unique, ops::Reduce>;

auto op_name(const OperatorSpec& op) -> std::string_view;

/// A base table name followed by a chain of operators.
///
/// The builder methods return a modified copy, so plans read like the
/// operator chains they describe:
///
///     QueryPlan("preds").join("preds", key, fkey).filter(pred).flatten()
class QueryPlan {
public:
    QueryPlan() = default;
    explicit QueryPlan(std::string base) : base_(std::move(base)) {}

    auto base() const -> const std::string& { return base_; }
    auto ops() const -> const std::vector<OperatorSpec>& { return ops_; }

    auto then(OperatorSpec op) const -> QueryPlan;
    auto join(std::string right, Udf key, Udf fkey) const -> QueryPlan;
    auto project(Udf fn, std::optional<std::size_t> batch_size = std::nullopt) const -> QueryPlan;
    auto filter(Udf pred) const -> QueryPlan;
    auto order_by(Udf key, bool reverse = false) const -> QueryPlan;
    auto group_by(Udf key) const -> QueryPlan;
    auto flatten() const -> QueryPlan;
    auto unique() const -> QueryPlan;
    auto reduce(Udf fn) const -> QueryPlan;

private:
    std::string base_;
    std::vector<OperatorSpec> ops_;
};

struct RegisterStmt {
    std::string name;
    Table table;
    bool overwrite = false;
};

/// `name <- plan`. Rebinding an existing name replaces it.
struct QueryStmt {
    std::string name;
    QueryPlan plan;
};

using Statement = std::variant<RegisterStmt, QueryStmt>;
using Program = std::vector<Statement>;

struct OperatorProfile {
    std::string op;
    std::size_t in_rows = 0;
    std::size_t out_rows = 0;
    double seconds = 0.0;
};

/// Per-operator timings of one query evaluation.
struct ProfileReport {
    std::vector<OperatorProfile> entries;
    double total_seconds = 0.0;

    auto operator_seconds() const -> double;
    /// Aligned text columns: op, in-rows, out-rows, seconds (3 decimals).
    auto render() const -> std::string;
};

struct QueryResult {
    Table table;
    std::optional<ProfileReport> profile;
};

struct NamedProfile {
    std::string name;
    ProfileReport report;
};

// Single-operator entry points. Positions in UdfError are row indices; the
// operator index is left as UdfError::npos and filled in by eval_query.

/// Hash equijoin. If left_is_join_product, each left row is an N-tuple built
/// by an earlier join and the matching right row is appended to it.
auto op_join(const Database& db, const Table& left, const std::string& right_name,
             const Udf& key, const Udf& fkey, bool left_is_join_product = false) -> Table;
auto op_project(const Table& t, const Udf& fn) -> Table;
/// Chunked projection; chunks may run concurrently, output order is fixed.
auto op_project_batched(const Table& t, const Udf& fn, std::size_t batch_size) -> Table;
auto op_filter(const Table& t, const Udf& pred) -> Table;
auto op_order_by(const Table& t, const Udf& key, bool reverse = false) -> Table;
auto op_group_by(const Table& t, const Udf& key) -> Table;
auto op_flatten(const Table& t) -> Table;
auto op_unique(const Table& t) -> Table;
auto op_reduce(const Table& t, const Udf& fn) -> Table;

/// True if rows produced by `op` are join tuples, given whether its input rows were.
auto keeps_join_product(const OperatorSpec& op, bool input_is_join_product) -> bool;

auto eval_query(const Database& db, const QueryPlan& plan, bool profile = false) -> QueryResult;

/// Runs statements in order. On error the input database is untouched and
/// the exception carries the failing statement index.
auto eval_program(const Database& db, const Program& program) -> Database;
auto eval_program(const Database& db, const Program& program,
                  std::vector<NamedProfile>* profiles) -> Database;

}  // namespace objql
