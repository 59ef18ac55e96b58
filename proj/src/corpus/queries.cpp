#include <objql/corpus.hpp>

namespace objql::corpus {

namespace {

auto field(const Value& row, std::string_view name) -> const Value& {
    const Value* v = row.find(name);
    if (!v) {
        throw TypeMismatch("row has no field '" + std::string(name) + "'");
    }
    return *v;
}

auto at(const Value& v, std::size_t i) -> const Value& {
    const auto& xs = v.as_list();
    if (i >= xs.size()) {
        throw TypeMismatch("index " + std::to_string(i) + " out of range");
    }
    return xs[i];
}

auto plus(const Value& v, std::int64_t d) -> Value { return v.as_int() + d; }

auto seq_frame_key(std::int64_t offset) -> Udf {
    return Udf::key([offset](const Value& r) {
        return Value::list({field(r, "seq_id"), plus(field(r, "frame_id"), offset)});
    });
}

auto values_of(const Value& xs) -> std::vector<double> {
    std::vector<double> out;
    for (const auto& x : xs.items()) {
        out.push_back(x.as_number());
    }
    return out;
}

}  // namespace

auto temporal_matches_plan(const std::string& preds) -> QueryPlan {
    return QueryPlan(preds)
        .join(preds, seq_frame_key(1), seq_frame_key(0))
        .join(preds,
              Udf::args(UdfKind::Key,
                        [](std::span<const Value> a) {
                            return Value::list(
                                {field(a[0], "seq_id"), plus(field(a[0], "frame_id"), 2)});
                        }),
              seq_frame_key(0))
        .project(Udf::args(UdfKind::Row,
                           [](std::span<const Value> a) {
                               return match_three(detection_from_value(a[0]),
                                                  detection_from_value(a[1]),
                                                  detection_from_value(a[2]));
                           }))
        .flatten();
}

auto q_temporal_consistency(const Database& db) -> Table {
    auto plan = temporal_matches_plan().filter(Udf::pred([](const Value& chain) {
        const Value& labels = at(chain, 2);
        return Value(value_equals(at(labels, 0), at(labels, 1)) &&
                     value_equals(at(labels, 2), Value(kNoMatch)) &&
                     is_center(box_from_value(at(at(chain, 3), 0))));
    }));
    return eval_query(db, plan).table;
}

auto q_high_velocity(const Database& db, double cutoff) -> Table {
    auto plan = temporal_matches_plan()
                    .filter(Udf::pred([cutoff](const Value& chain) {
                        if (value_equals(at(at(chain, 2), 1), Value(kNoMatch))) {
                            return Value(false);
                        }
                        const Value& boxes = at(chain, 3);
                        return Value(center_distance(box_from_value(at(boxes, 0)),
                                                     box_from_value(at(boxes, 1))) > cutoff);
                    }))
                    .group_by(Udf::key([](const Value& chain) {
                        return Value::list({at(chain, 0), at(at(chain, 1), 0)});
                    }));
    return eval_query(db, plan).table;
}

auto iqr_outliers_program(bool use_all_values) -> Program {
    auto basis =
        QueryPlan("series")
            .filter(Udf::pred([use_all_values](const Value& r) {
                return Value(!field(r, "value").is_null() &&
                             (use_all_values || !field(r, "imputed").as_bool()));
            }))
            .group_by(Udf::key([](const Value& r) {
                return Value::list({field(r, "sample_id"), field(r, "feature")});
            }))
            .project(Udf::row([](const Value& g) {
                std::vector<double> xs;
                for (const auto& r : at(g, 1).items()) {
                    xs.push_back(field(r, "value").as_number());
                }
                auto [lo, hi] = iqr_bounds(xs);
                return Value::map({{"key", at(g, 0)}, {"bounds", Value::list({lo, hi})}});
            }));
    auto outliers =
        QueryPlan("series")
            .filter(Udf::pred([](const Value& r) {
                return Value(field(r, "imputed").as_bool() && !field(r, "value").is_null());
            }))
            .join("iqr_basis", Udf::key([](const Value& r) {
                      return Value::list({field(r, "sample_id"), field(r, "feature")});
                  }),
                  Udf::key([](const Value& b) { return field(b, "key"); }))
            .filter(Udf::args(UdfKind::Pred,
                              [](std::span<const Value> a) {
                                  const Value& b = field(a[1], "bounds");
                                  return Value(outside_bounds(
                                      field(a[0], "value").as_number(),
                                      {at(b, 0).as_number(), at(b, 1).as_number()}));
                              }))
            .project(Udf::args(UdfKind::Row, [](std::span<const Value> a) { return a[0]; }));
    return {QueryStmt{"iqr_basis", basis}, QueryStmt{"iqr_outliers", outliers}};
}

auto q_iqr_outliers(const Database& db, bool use_all_values) -> Table {
    return eval_program(db, iqr_outliers_program(use_all_values)).at("iqr_outliers");
}

auto q_multilabel_sequences(const Database& db) -> Table {
    auto plan = QueryPlan("labels")
                    .group_by(Udf::key([](const Value& r) { return field(r, "seq_id"); }))
                    .project(Udf::row([](const Value& g) {
                        ValueList labels;
                        for (const auto& r : at(g, 1).items()) {
                            labels.push_back(field(r, "label"));
                        }
                        Value unique = Value::set(std::move(labels));
                        auto n = static_cast<std::int64_t>(unique.items().size());
                        return Value::list({at(g, 0), n, unique});
                    }))
                    .filter(Udf::pred([](const Value& r) { return Value(at(r, 1).as_int() > 1); }))
                    .order_by(Udf::key([](const Value& r) { return at(r, 1); }), true);
    return eval_query(db, plan).table;
}

auto q_empty_frame_mislabels(const Database& db, double thresh) -> Table {
    auto plan = QueryPlan("frame_diffs").filter(Udf::pred([thresh](const Value& r) {
        double d = field(r, "diff").as_number();
        return Value(field(r, "label").as_text() != "empty" && d > 0 && d <= thresh);
    }));
    return eval_query(db, plan).table;
}

auto temporal_key(const Value& row) -> Value {
    return Value::list({at(row, 0), at(at(row, 1), 0), at(at(row, 3), 0)});
}

auto velocity_key(const Value& row) -> Value { return at(row, 0); }

auto outlier_key(const Value& row) -> Value {
    return Value::list({field(row, "sample_id"), field(row, "feature"), field(row, "t")});
}

auto multilabel_key(const Value& row) -> Value { return at(row, 0); }

auto mislabel_key(const Value& row) -> Value {
    return Value::list({field(row, "seq_id"), field(row, "frame_id")});
}

void register_builtins(qlang::BuiltinRegistry& registry) {
    registry.add({"match_three", 3, 4, [](std::span<const Value> a) -> Value {
                      double thresh = a.size() > 3 ? a[3].as_number() : kMatchThreshold;
                      return match_three(detection_from_value(a[0]), detection_from_value(a[1]),
                                         detection_from_value(a[2]), thresh);
                  }});
    registry.add({"is_center", 1, 1,
                  [](std::span<const Value> a) -> Value { return is_center(box_from_value(a[0])); }});
    registry.add({"center_dist", 2, 2, [](std::span<const Value> a) -> Value {
                      return center_distance(box_from_value(a[0]), box_from_value(a[1]));
                  }});
    registry.add({"iou", 2, 2, [](std::span<const Value> a) -> Value {
                      return iou(box_from_value(a[0]), box_from_value(a[1]));
                  }});
    registry.add({"iqr_bounds", 1, 1, [](std::span<const Value> a) -> Value {
                      auto [lo, hi] = iqr_bounds(values_of(a[0]));
                      return Value::list({lo, hi});
                  }});
}

auto builtins() -> const qlang::BuiltinRegistry& {
    static const qlang::BuiltinRegistry registry = [] {
        auto r = qlang::BuiltinRegistry::core();
        register_builtins(r);
        return r;
    }();
    return registry;
}

}  // namespace objql::corpus
