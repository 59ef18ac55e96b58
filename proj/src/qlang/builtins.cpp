#include <objql/qlang/compiler.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace objql::qlang {

namespace {

auto numbers_of(const Value& xs, std::string_view fn) -> std::vector<double> {
    if (!xs.is_list() && !xs.is_set()) {
        throw EvalError(std::string(fn) + ": expected a list of numbers, got " +
                        std::string(kind_name(xs.kind())));
    }
    std::vector<double> out;
    out.reserve(xs.items().size());
    for (const auto& x : xs.items()) {
        if (!x.is_numeric()) {
            throw EvalError(std::string(fn) + ": non-numeric element " + to_string(x));
        }
        out.push_back(x.as_number());
    }
    return out;
}

auto collection_size(const Value& v, std::string_view fn) -> std::int64_t {
    switch (v.kind()) {
        case Value::Kind::List:
        case Value::Kind::Set: return static_cast<std::int64_t>(v.items().size());
        case Value::Kind::Map: return static_cast<std::int64_t>(v.map_entries().size());
        default:
            throw EvalError(std::string(fn) + ": expected a collection, got " +
                            std::string(kind_name(v.kind())));
    }
}

auto utf8_length(const std::string& s) -> std::int64_t {
    std::int64_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xc0) != 0x80) {
            ++n;
        }
    }
    return n;
}

// min/max over one collection argument or over several arguments.
auto extreme(std::span<const Value> args, bool want_max, std::string_view fn) -> Value {
    std::span<const Value> pool = args;
    if (args.size() == 1) {
        if (!args[0].is_list() && !args[0].is_set()) {
            throw EvalError(std::string(fn) + ": expected a list, got " +
                            std::string(kind_name(args[0].kind())));
        }
        pool = std::span<const Value>(args[0].items());
    }
    if (pool.empty()) {
        throw EvalError(std::string(fn) + " of an empty collection");
    }
    const Value* best = &pool[0];
    for (const auto& v : pool.subspan(1)) {
        auto c = value_compare(v, *best);
        if (want_max ? c > 0 : c < 0) {
            best = &v;
        }
    }
    return *best;
}

}  // namespace

auto linear_quantile(std::vector<double> xs, double p) -> double {
    if (xs.empty()) {
        throw EvalError("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw EvalError("quantile probability must lie in [0, 1]");
    }
    std::sort(xs.begin(), xs.end());
    double pos = p * static_cast<double>(xs.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

void BuiltinRegistry::add(Builtin b) {
    std::string name = b.name;
    fns_.insert_or_assign(std::move(name), std::move(b));
}

auto BuiltinRegistry::find(std::string_view name) const -> const Builtin* {
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
}

auto BuiltinRegistry::names() const -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& [n, _] : fns_) {
        out.push_back(n);
    }
    return out;
}

auto BuiltinRegistry::core() -> BuiltinRegistry {
    constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);
    BuiltinRegistry r;

    r.add({"len", 1, 1, [](std::span<const Value> a) -> Value {
               if (a[0].is_text()) {
                   return utf8_length(a[0].as_text());
               }
               return collection_size(a[0], "len");
           }});
    r.add({"count", 1, 1,
           [](std::span<const Value> a) -> Value { return collection_size(a[0], "count"); }});
    r.add({"abs", 1, 1, [](std::span<const Value> a) -> Value {
               if (a[0].is_int()) {
                   auto i = a[0].as_int();
                   if (i == std::numeric_limits<std::int64_t>::min()) {
                       throw EvalError("abs: integer overflow");
                   }
                   return i < 0 ? -i : i;
               }
               if (a[0].is_float()) {
                   return std::fabs(a[0].as_float());
               }
               throw EvalError("abs: expected a number, got " +
                               std::string(kind_name(a[0].kind())));
           }});
    r.add({"min", 1, kVariadic,
           [](std::span<const Value> a) -> Value { return extreme(a, false, "min"); }});
    r.add({"max", 1, kVariadic,
           [](std::span<const Value> a) -> Value { return extreme(a, true, "max"); }});
    r.add({"sum", 1, 1, [](std::span<const Value> a) -> Value {
               const Value& xs = a[0];
               if (!xs.is_list() && !xs.is_set()) {
                   throw EvalError("sum: expected a list, got " +
                                   std::string(kind_name(xs.kind())));
               }
               std::int64_t isum = 0;
               double fsum = 0;
               bool any_float = false;
               for (const auto& x : xs.items()) {
                   if (x.is_int()) {
                       if (__builtin_add_overflow(isum, x.as_int(), &isum)) {
                           throw EvalError("sum: integer overflow");
                       }
                   } else if (x.is_float()) {
                       any_float = true;
                       fsum += x.as_float();
                   } else {
                       throw EvalError("sum: non-numeric element " + to_string(x));
                   }
               }
               if (any_float) {
                   return fsum + static_cast<double>(isum);
               }
               return isum;
           }});
    r.add({"mean", 1, 1, [](std::span<const Value> a) -> Value {
               auto xs = numbers_of(a[0], "mean");
               if (xs.empty()) {
                   throw EvalError("mean of an empty collection");
               }
               double s = 0;
               for (double x : xs) {
                   s += x;
               }
               return s / static_cast<double>(xs.size());
           }});
    r.add({"quantile", 2, 2, [](std::span<const Value> a) -> Value {
               if (!a[1].is_numeric()) {
                   throw EvalError("quantile: probability must be a number");
               }
               return linear_quantile(numbers_of(a[0], "quantile"), a[1].as_number());
           }});
    r.add({"contains", 2, 2, [](std::span<const Value> a) -> Value {
               const Value& c = a[0];
               const Value& v = a[1];
               switch (c.kind()) {
                   case Value::Kind::List:
                   case Value::Kind::Set:
                       return std::any_of(c.items().begin(), c.items().end(),
                                          [&](const Value& x) { return value_equals(x, v); });
                   case Value::Kind::Map:
                       return std::any_of(
                           c.map_entries().begin(), c.map_entries().end(),
                           [&](const MapEntry& e) { return value_equals(e.first, v); });
                   case Value::Kind::Text:
                       if (!v.is_text()) {
                           throw EvalError("contains: text can only contain text");
                       }
                       return c.as_text().find(v.as_text()) != std::string::npos;
                   default:
                       throw EvalError("contains: expected a collection, got " +
                                       std::string(kind_name(c.kind())));
               }
           }});
    r.add({"keys", 1, 1, [](std::span<const Value> a) -> Value {
               if (!a[0].is_map()) {
                   throw EvalError("keys: expected a map, got " +
                                   std::string(kind_name(a[0].kind())));
               }
               ValueList ks;
               for (const auto& [k, _] : a[0].map_entries()) {
                   ks.push_back(k);
               }
               return Value::list(std::move(ks));
           }});
    r.add({"setof", 1, 1, [](std::span<const Value> a) -> Value {
               if (!a[0].is_list() && !a[0].is_set()) {
                   throw EvalError("setof: expected a list, got " +
                                   std::string(kind_name(a[0].kind())));
               }
               return Value::set(a[0].items());
           }});
    r.add({"str", 1, 1, [](std::span<const Value> a) -> Value {
               return a[0].is_text() ? a[0] : Value(to_string(a[0]));
           }});
    // pluck(rows, "field"): the named field of every element.
    r.add({"pluck", 2, 2, [](std::span<const Value> a) -> Value {
               if (!a[0].is_list() && !a[0].is_set()) {
                   throw EvalError("pluck: expected a list, got " +
                                   std::string(kind_name(a[0].kind())));
               }
               if (!a[1].is_text()) {
                   throw EvalError("pluck: field name must be text");
               }
               ValueList out;
               out.reserve(a[0].items().size());
               for (const auto& row : a[0].items()) {
                   const Value* v = row.find(a[1].as_text());
                   if (!v) {
                       throw EvalError("pluck: no field '" + a[1].as_text() + "' in " +
                                       to_string(row));
                   }
                   out.push_back(*v);
               }
               return Value::list(std::move(out));
           }});
    return r;
}

}  // namespace objql::qlang
