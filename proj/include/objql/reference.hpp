#pragma once

#include <objql/engine.hpp>

#include <cstddef>

namespace objql::reference {

/// Recursion instrumentation for the rule-by-rule interpreter. Reset before
/// a call and inspect afterwards; single-threaded use only.
struct Trace {
    std::size_t group_depth = 0;
    std::size_t unique_depth = 0;
};

auto trace() -> Trace&;

// Unoptimised interpreter that follows the inference rules literally:
// nested-loop join, head/tail recursion for group_by and unique, insertion
// sort for order_by. Quadratic by construction; keep inputs small.

auto ref_eval_query(const Database& db, const QueryPlan& plan) -> Table;
/// Same, recording per-operator wall time (used by the bench command).
auto ref_eval_query(const Database& db, const QueryPlan& plan, ProfileReport* profile) -> Table;
auto ref_eval_program(const Database& db, const Program& program) -> Database;
auto ref_eval_program(const Database& db, const Program& program,
                      std::vector<NamedProfile>* profiles) -> Database;

/// The nested-loop join on its own (the contrast case for hash-join scaling).
auto ref_join(const Table& left, const Table& right, const Udf& key, const Udf& fkey,
              bool left_is_join_product = false) -> Table;

}  // namespace objql::reference
