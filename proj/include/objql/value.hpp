#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace objql {

class Value;

using ValueList = std::vector<Value>;
using MapEntry = std::pair<Value, Value>;

/// Universal schema-free object: a primitive, a list, a set or a map.
///
/// Values are immutable. Composite payloads are reference counted so copies
/// are cheap and safe to share between threads. Sets are stored sorted by
/// value_compare with duplicates removed; maps are stored sorted by key with
/// unique keys (Text or Int only).
class Value {
public:
    enum class Kind : std::uint8_t { Null, Bool, Int, Float, Text, List, Set, Map };

    Value() = default;
    Value(std::nullptr_t) {}
    Value(bool b) : data_(b) {}
    template <std::integral I>
        requires(!std::same_as<I, bool>)
    Value(I i) : data_(static_cast<std::int64_t>(i)) {}
    Value(double d) : data_(d) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(std::string_view s) : data_(std::string(s)) {}
    Value(const char* s) : data_(std::string(s)) {}

    static auto list(ValueList items) -> Value;
    static auto list(std::initializer_list<Value> items) -> Value;
    /// Builds a set; duplicate elements (under value_equals) collapse.
    static auto set(ValueList items) -> Value;
    /// Builds a map. Keys must be Text or Int; a repeated key keeps the last value.
    static auto map(std::vector<MapEntry> entries) -> Value;
    static auto map(std::initializer_list<MapEntry> entries) -> Value;

    auto kind() const -> Kind { return static_cast<Kind>(data_.index()); }

    auto is_null() const -> bool { return kind() == Kind::Null; }
    auto is_bool() const -> bool { return kind() == Kind::Bool; }
    auto is_int() const -> bool { return kind() == Kind::Int; }
    auto is_float() const -> bool { return kind() == Kind::Float; }
    auto is_numeric() const -> bool { return is_int() || is_float(); }
    auto is_text() const -> bool { return kind() == Kind::Text; }
    auto is_list() const -> bool { return kind() == Kind::List; }
    auto is_set() const -> bool { return kind() == Kind::Set; }
    auto is_map() const -> bool { return kind() == Kind::Map; }

    // Checked accessors; throw objql::TypeMismatch on the wrong kind.
    auto as_bool() const -> bool;
    auto as_int() const -> std::int64_t;
    auto as_float() const -> double;
    /// Int or Float widened to double.
    auto as_number() const -> double;
    auto as_text() const -> const std::string&;
    auto as_list() const -> const ValueList&;
    auto set_items() const -> const ValueList&;
    auto map_entries() const -> const std::vector<MapEntry>&;

    /// Elements of a List or Set (sets in value_compare order).
    auto items() const -> const ValueList&;

    auto find(std::string_view key) const -> const Value*;
    auto find(std::int64_t key) const -> const Value*;

private:
    struct SetData {
        ValueList items;
    };
    using Storage = std::variant<std::monostate, bool, std::int64_t, double, std::string,
                                 std::shared_ptr<const ValueList>,
                                 std::shared_ptr<const SetData>,
                                 std::shared_ptr<const std::vector<MapEntry>>>;
    Storage data_;
};

/// Deep structural equality. Int and Float compare by exact mathematical
/// value; NaN equals NaN and -0.0 equals +0.0.
auto value_equals(const Value& a, const Value& b) -> bool;

/// Total order. Kind ranks: Null < Bool < numeric < Text < List < Set < Map.
/// NaN sorts above every other number.
auto value_compare(const Value& a, const Value& b) -> std::weak_ordering;

inline auto operator==(const Value& a, const Value& b) -> bool { return value_equals(a, b); }
inline auto operator<=>(const Value& a, const Value& b) -> std::weak_ordering {
    return value_compare(a, b);
}

/// Ordered sequence of rows.
class Table {
public:
    Table() = default;
    explicit Table(ValueList rows) : rows_(std::move(rows)) {}
    Table(std::initializer_list<Value> rows) : rows_(rows) {}

    auto size() const -> std::size_t { return rows_.size(); }
    auto empty() const -> bool { return rows_.empty(); }
    auto operator[](std::size_t i) const -> const Value& { return rows_[i]; }
    auto begin() const { return rows_.begin(); }
    auto end() const { return rows_.end(); }
    auto rows() const -> const ValueList& { return rows_; }
    /// Releases the rows (the table is left empty).
    auto take_rows() && -> ValueList { return std::move(rows_); }
    /// The table as a single List value.
    auto as_value() const -> Value { return Value::list(rows_); }

    friend auto operator==(const Table& a, const Table& b) -> bool = default;

private:
    ValueList rows_;
};

/// Canonical byte encoding; equal bytes iff value_equals.
struct CanonicalKey {
    std::string bytes;

    friend auto operator==(const CanonicalKey&, const CanonicalKey&) -> bool = default;
};

struct CanonicalKeyHash {
    auto operator()(const CanonicalKey& k) const noexcept -> std::size_t {
        return std::hash<std::string>{}(k.bytes);
    }
};


/// Stricter than value_equals: kinds must match at every level (1 != 1.0)
/// and floats must agree bit-for-bit, except that all NaNs are identical.
auto value_identical(const Value& a, const Value& b) -> bool;
auto tables_identical(const Table& a, const Table& b) -> bool;

auto canonical_encode(const Value& v) -> CanonicalKey;
/// Appends the encoding of v to out.
void canonical_encode_into(const Value& v, std::string& out);

auto kind_name(Value::Kind k) -> std::string_view;

/// Compact human-readable rendering (JSON-like; sets print as #{...}).
auto to_string(const Value& v) -> std::string;
auto to_string(const Table& t) -> std::string;

/// Shortest round-trip decimal form of a double; always contains '.', 'e',
/// or is one of nan/inf/-inf.
auto format_double(double d) -> std::string;


}  // namespace objql
