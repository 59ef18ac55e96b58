#include <objql/errors.hpp>
#include <objql/value.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

namespace objql {

namespace {

constexpr double kTwo63 = 9223372036854775808.0;

auto type_error(std::string_view want, Value::Kind got) -> TypeMismatch {
    return TypeMismatch("expected " + std::string(want) + ", got " + std::string(kind_name(got)));
}

// Rank of the kind in the cross-type order; Int and Float share a rank.
auto kind_rank(Value::Kind k) -> int {
    switch (k) {
        case Value::Kind::Null: return 0;
        case Value::Kind::Bool: return 1;
        case Value::Kind::Int:
        case Value::Kind::Float: return 2;
        case Value::Kind::Text: return 3;
        case Value::Kind::List: return 4;
        case Value::Kind::Set: return 5;
        case Value::Kind::Map: return 6;
    }
    return 7;
}

// Exact comparison of an integer against a double. NaN is greatest.
auto compare_int_double(std::int64_t i, double d) -> std::weak_ordering {
    if (std::isnan(d)) {
        return std::weak_ordering::less;
    }
    if (d >= kTwo63) {
        return std::weak_ordering::less;
    }
    if (d < -kTwo63) {
        return std::weak_ordering::greater;
    }
    double whole = std::trunc(d);
    auto wi = static_cast<std::int64_t>(whole);
    if (i != wi) {
        return i < wi ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    double frac = d - whole;
    if (frac > 0) {
        return std::weak_ordering::less;
    }
    if (frac < 0) {
        return std::weak_ordering::greater;
    }
    return std::weak_ordering::equivalent;
}

auto compare_doubles(double a, double b) -> std::weak_ordering {
    bool na = std::isnan(a);
    bool nb = std::isnan(b);
    if (na || nb) {
        if (na && nb) {
            return std::weak_ordering::equivalent;
        }
        return na ? std::weak_ordering::greater : std::weak_ordering::less;
    }
    if (a < b) {
        return std::weak_ordering::less;
    }
    if (a > b) {
        return std::weak_ordering::greater;
    }
    return std::weak_ordering::equivalent;
}

auto compare_numeric(const Value& a, const Value& b) -> std::weak_ordering {
    if (a.is_int() && b.is_int()) {
        return a.as_int() <=> b.as_int();
    }
    if (a.is_int()) {
        return compare_int_double(a.as_int(), b.as_float());
    }
    if (b.is_int()) {
        return 0 <=> compare_int_double(b.as_int(), a.as_float());
    }
    return compare_doubles(a.as_float(), b.as_float());
}

template <typename Range, typename Cmp>
auto lexicographic(const Range& a, const Range& b, Cmp cmp) -> std::weak_ordering {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto c = cmp(a[i], b[i]);
        if (c != 0) {
            return c;
        }
    }
    return a.size() <=> b.size();
}

// Float whose value is an exact 64-bit integer.
auto integral_double(double d, std::int64_t& out) -> bool {
    if (!std::isfinite(d) || d != std::trunc(d) || d < -kTwo63 || d >= kTwo63) {
        return false;
    }
    out = static_cast<std::int64_t>(d);
    return true;
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<char>((v >> shift) & 0xff));
    }
}

enum Tag : char {
    kTagNull = 0,
    kTagBool = 1,
    kTagInt = 2,
    kTagFloat = 3,
    kTagText = 4,
    kTagList = 5,
    kTagSet = 6,
    kTagMap = 7,
};

void render(const Value& v, std::string& out);

void render_text(const std::string& s, std::string& out) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
}

void render_seq(const ValueList& items, std::string& out) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += ", ";
        }
        render(items[i], out);
    }
}

void render(const Value& v, std::string& out) {
    switch (v.kind()) {
        case Value::Kind::Null: out += "null"; break;
        case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
        case Value::Kind::Int: out += std::to_string(v.as_int()); break;
        case Value::Kind::Float: out += format_double(v.as_float()); break;
        case Value::Kind::Text: render_text(v.as_text(), out); break;
        case Value::Kind::List:
            out.push_back('[');
            render_seq(v.as_list(), out);
            out.push_back(']');
            break;
        case Value::Kind::Set:
            out += "#{";
            render_seq(v.set_items(), out);
            out.push_back('}');
            break;
        case Value::Kind::Map: {
            out.push_back('{');
            bool first = true;
            for (const auto& [k, val] : v.map_entries()) {
                if (!first) {
                    out += ", ";
                }
                first = false;
                render(k, out);
                out += ": ";
                render(val, out);
            }
            out.push_back('}');
            break;
        }
    }
}

auto empty_list() -> const std::shared_ptr<const ValueList>& {
    static const auto empty = std::make_shared<const ValueList>();
    return empty;
}

}  // namespace

auto Value::list(ValueList items) -> Value {
    Value v;
    if (items.empty()) {
        v.data_ = empty_list();
    } else {
        v.data_ = std::make_shared<const ValueList>(std::move(items));
    }
    return v;
}

auto Value::list(std::initializer_list<Value> items) -> Value {
    return list(ValueList(items));
}

auto Value::set(ValueList items) -> Value {
    std::stable_sort(items.begin(), items.end(),
                     [](const Value& a, const Value& b) { return value_compare(a, b) < 0; });
    items.erase(std::unique(items.begin(), items.end(),
                            [](const Value& a, const Value& b) { return value_equals(a, b); }),
                items.end());
    Value v;
    v.data_ = std::make_shared<const SetData>(SetData{std::move(items)});
    return v;
}

auto Value::map(std::vector<MapEntry> entries) -> Value {
    for (const auto& e : entries) {
        if (!e.first.is_text() && !e.first.is_int()) {
            throw TypeMismatch("map keys must be Text or Int, got " +
                               std::string(kind_name(e.first.kind())));
        }
    }
    // Stable sort keeps insertion order among equal keys; keep the last.
    std::stable_sort(entries.begin(), entries.end(), [](const MapEntry& a, const MapEntry& b) {
        return value_compare(a.first, b.first) < 0;
    });
    std::vector<MapEntry> unique;
    unique.reserve(entries.size());
    for (auto& e : entries) {
        if (!unique.empty() && value_equals(unique.back().first, e.first)) {
            unique.back().second = std::move(e.second);
        } else {
            unique.push_back(std::move(e));
        }
    }
    Value v;
    v.data_ = std::make_shared<const std::vector<MapEntry>>(std::move(unique));
    return v;
}

auto Value::map(std::initializer_list<MapEntry> entries) -> Value {
    return map(std::vector<MapEntry>(entries));
}

auto Value::as_bool() const -> bool {
    if (!is_bool()) {
        throw type_error("Bool", kind());
    }
    return std::get<bool>(data_);
}

auto Value::as_int() const -> std::int64_t {
    if (!is_int()) {
        throw type_error("Int", kind());
    }
    return std::get<std::int64_t>(data_);
}

auto Value::as_float() const -> double {
    if (!is_float()) {
        throw type_error("Float", kind());
    }
    return std::get<double>(data_);
}

auto Value::as_number() const -> double {
    if (is_int()) {
        return static_cast<double>(std::get<std::int64_t>(data_));
    }
    if (is_float()) {
        return std::get<double>(data_);
    }
    throw type_error("number", kind());
}

auto Value::as_text() const -> const std::string& {
    if (!is_text()) {
        throw type_error("Text", kind());
    }
    return std::get<std::string>(data_);
}

auto Value::as_list() const -> const ValueList& {
    if (!is_list()) {
        throw type_error("List", kind());
    }
    return *std::get<5>(data_);
}

auto Value::set_items() const -> const ValueList& {
    if (!is_set()) {
        throw type_error("Set", kind());
    }
    return std::get<6>(data_)->items;
}

auto Value::map_entries() const -> const std::vector<MapEntry>& {
    if (!is_map()) {
        throw type_error("Map", kind());
    }
    return *std::get<7>(data_);
}

auto Value::items() const -> const ValueList& {
    if (is_list()) {
        return *std::get<5>(data_);
    }
    if (is_set()) {
        return std::get<6>(data_)->items;
    }
    throw type_error("List or Set", kind());
}

auto Value::find(std::string_view key) const -> const Value* {
    if (!is_map()) {
        return nullptr;
    }
    const auto& entries = *std::get<7>(data_);
    // Text keys sort after Int keys and among themselves by code point.
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const MapEntry& e, std::string_view k) {
                                   if (e.first.is_int()) {
                                       return true;
                                   }
                                   return std::string_view(e.first.as_text()) < k;
                               });
    if (it != entries.end() && it->first.is_text() && it->first.as_text() == key) {
        return &it->second;
    }
    return nullptr;
}

auto Value::find(std::int64_t key) const -> const Value* {
    if (!is_map()) {
        return nullptr;
    }
    const auto& entries = *std::get<7>(data_);
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const MapEntry& e, std::int64_t k) {
                                   return e.first.is_int() && e.first.as_int() < k;
                               });
    if (it != entries.end() && it->first.is_int() && it->first.as_int() == key) {
        return &it->second;
    }
    return nullptr;
}

auto value_compare(const Value& a, const Value& b) -> std::weak_ordering {
    int ra = kind_rank(a.kind());
    int rb = kind_rank(b.kind());
    if (ra != rb) {
        return ra <=> rb;
    }
    switch (a.kind()) {
        case Value::Kind::Null: return std::weak_ordering::equivalent;
        case Value::Kind::Bool: return a.as_bool() <=> b.as_bool();
        case Value::Kind::Int:
        case Value::Kind::Float: return compare_numeric(a, b);
        case Value::Kind::Text: {
            // Byte order of UTF-8 equals code point order.
            int c = a.as_text().compare(b.as_text());
            return c < 0 ? std::weak_ordering::less
                   : c > 0 ? std::weak_ordering::greater
                           : std::weak_ordering::equivalent;
        }
        case Value::Kind::List: return lexicographic(a.as_list(), b.as_list(), value_compare);
        case Value::Kind::Set: return lexicographic(a.set_items(), b.set_items(), value_compare);
        case Value::Kind::Map:
            return lexicographic(a.map_entries(), b.map_entries(),
                                 [](const MapEntry& x, const MapEntry& y) {
                                     auto c = value_compare(x.first, y.first);
                                     return c != 0 ? c : value_compare(x.second, y.second);
                                 });
    }
    return std::weak_ordering::equivalent;
}

auto value_equals(const Value& a, const Value& b) -> bool {
    if (a.kind() != b.kind() && !(a.is_numeric() && b.is_numeric())) {
        return false;
    }
    switch (a.kind()) {
        case Value::Kind::Null: return true;
        case Value::Kind::Bool: return a.as_bool() == b.as_bool();
        case Value::Kind::Int:
        case Value::Kind::Float: return compare_numeric(a, b) == 0;
        case Value::Kind::Text: return a.as_text() == b.as_text();
        case Value::Kind::List:
        case Value::Kind::Set: {
            const auto& x = a.items();
            const auto& y = b.items();
            return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), value_equals);
        }
        case Value::Kind::Map: {
            const auto& x = a.map_entries();
            const auto& y = b.map_entries();
            return x.size() == y.size() &&
                   std::equal(x.begin(), x.end(), y.begin(), [](const auto& p, const auto& q) {
                       return value_equals(p.first, q.first) && value_equals(p.second, q.second);
                   });
        }
    }
    return false;
}

auto value_identical(const Value& a, const Value& b) -> bool {
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
        case Value::Kind::Float: {
            double x = a.as_float();
            double y = b.as_float();
            if (std::isnan(x) || std::isnan(y)) {
                return std::isnan(x) && std::isnan(y);
            }
            return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
        }
        case Value::Kind::List:
        case Value::Kind::Set: {
            const auto& x = a.items();
            const auto& y = b.items();
            return x.size() == y.size() &&
                   std::equal(x.begin(), x.end(), y.begin(), value_identical);
        }
        case Value::Kind::Map: {
            const auto& x = a.map_entries();
            const auto& y = b.map_entries();
            return x.size() == y.size() &&
                   std::equal(x.begin(), x.end(), y.begin(), [](const auto& p, const auto& q) {
                       return value_identical(p.first, q.first) &&
                              value_identical(p.second, q.second);
                   });
        }
        default: return value_equals(a, b);
    }
}

auto tables_identical(const Table& a, const Table& b) -> bool {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), value_identical);
}

void canonical_encode_into(const Value& v, std::string& out) {
    switch (v.kind()) {
        case Value::Kind::Null: out.push_back(kTagNull); break;
        case Value::Kind::Bool:
            out.push_back(kTagBool);
            out.push_back(v.as_bool() ? 1 : 0);
            break;
        case Value::Kind::Int:
            out.push_back(kTagInt);
            put_u64(out, static_cast<std::uint64_t>(v.as_int()));
            break;
        case Value::Kind::Float: {
            double d = v.as_float();
            std::int64_t whole = 0;
            if (integral_double(d, whole)) {
                // Also covers -0.0.
                out.push_back(kTagInt);
                put_u64(out, static_cast<std::uint64_t>(whole));
            } else {
                out.push_back(kTagFloat);
                if (std::isnan(d)) {
                    put_u64(out, 0x7ff8000000000000ULL);
                } else {
                    put_u64(out, std::bit_cast<std::uint64_t>(d));
                }
            }
            break;
        }
        case Value::Kind::Text: {
            const auto& s = v.as_text();
            out.push_back(kTagText);
            put_u64(out, s.size());
            out += s;
            break;
        }
        case Value::Kind::List:
        case Value::Kind::Set: {
            // Set items are already in value_compare order.
            const auto& items = v.items();
            out.push_back(v.is_list() ? kTagList : kTagSet);
            put_u64(out, items.size());
            for (const auto& item : items) {
                canonical_encode_into(item, out);
            }
            break;
        }
        case Value::Kind::Map: {
            const auto& entries = v.map_entries();
            out.push_back(kTagMap);
            put_u64(out, entries.size());
            for (const auto& [k, val] : entries) {
                canonical_encode_into(k, out);
                canonical_encode_into(val, out);
            }
            break;
        }
    }
}

auto canonical_encode(const Value& v) -> CanonicalKey {
    CanonicalKey key;
    canonical_encode_into(v, key.bytes);
    return key;
}

auto kind_name(Value::Kind k) -> std::string_view {
    switch (k) {
        case Value::Kind::Null: return "Null";
        case Value::Kind::Bool: return "Bool";
        case Value::Kind::Int: return "Int";
        case Value::Kind::Float: return "Float";
        case Value::Kind::Text: return "Text";
        case Value::Kind::List: return "List";
        case Value::Kind::Set: return "Set";
        case Value::Kind::Map: return "Map";
    }
    return "?";
}

auto format_double(double d) -> std::string {
    if (std::isnan(d)) {
        return "nan";
    }
    if (std::isinf(d)) {
        return d > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    return s;
}

auto to_string(const Value& v) -> std::string {
    std::string out;
    render(v, out);
    return out;
}

auto to_string(const Table& t) -> std::string {
    std::string out = "[";
    render_seq(t.rows(), out);
    out.push_back(']');
    return out;
}

}  // namespace objql
