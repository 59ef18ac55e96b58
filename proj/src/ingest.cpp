#include <objql/errors.hpp>
#include <objql/ingest.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace objql::ingest {

namespace {

using nlohmann::json;

auto wrapper_key(const std::string& k) -> bool {
    return k == "$set" || k == "$f" || k == "$map";
}

auto to_json(const Value& v) -> json {
    switch (v.kind()) {
        case Value::Kind::Null: return nullptr;
        case Value::Kind::Bool: return v.as_bool();
        case Value::Kind::Int: return v.as_int();
        case Value::Kind::Float: {
            double d = v.as_float();
            if (std::isnan(d)) {
                return json{{"$f", "nan"}};
            }
            if (std::isinf(d)) {
                return json{{"$f", d > 0 ? "+inf" : "-inf"}};
            }
            return d;
        }
        case Value::Kind::Text: return v.as_text();
        case Value::Kind::List: {
            json arr = json::array();
            for (const auto& item : v.as_list()) {
                arr.push_back(to_json(item));
            }
            return arr;
        }
        case Value::Kind::Set: {
            json arr = json::array();
            for (const auto& item : v.set_items()) {
                arr.push_back(to_json(item));
            }
            return json{{"$set", std::move(arr)}};
        }
        case Value::Kind::Map: {
            const auto& entries = v.map_entries();
            bool plain = true;
            for (const auto& [k, _] : entries) {
                if (!k.is_text()) {
                    plain = false;
                }
            }
            // A lone wrapper-named key would read back as a wrapper.
            if (plain && entries.size() == 1 && wrapper_key(entries.front().first.as_text())) {
                plain = false;
            }
            if (plain) {
                json obj = json::object();
                for (const auto& [k, val] : entries) {
                    obj[k.as_text()] = to_json(val);
                }
                return obj;
            }
            json pairs = json::array();
            for (const auto& [k, val] : entries) {
                pairs.push_back(json::array({to_json(k), to_json(val)}));
            }
            return json{{"$map", std::move(pairs)}};
        }
    }
    return nullptr;
}

auto from_json(const json& j) -> Value {
    switch (j.type()) {
        case json::value_t::null: return Value();
        case json::value_t::boolean: return Value(j.get<bool>());
        case json::value_t::number_integer: return Value(j.get<std::int64_t>());
        case json::value_t::number_unsigned: {
            auto u = j.get<std::uint64_t>();
            if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                return Value(static_cast<std::int64_t>(u));
            }
            return Value(static_cast<double>(u));
        }
        case json::value_t::number_float: return Value(j.get<double>());
        case json::value_t::string: return Value(j.get<std::string>());
        case json::value_t::array: {
            ValueList items;
            items.reserve(j.size());
            for (const auto& e : j) {
                items.push_back(from_json(e));
            }
            return Value::list(std::move(items));
        }
        case json::value_t::object: {
            if (j.size() == 1) {
                const auto& [key, body] = *j.items().begin();
                if (key == "$set" && body.is_array()) {
                    ValueList items;
                    for (const auto& e : body) {
                        items.push_back(from_json(e));
                    }
                    return Value::set(std::move(items));
                }
                if (key == "$f" && body.is_string()) {
                    const auto& s = body.get_ref<const std::string&>();
                    if (s == "nan") {
                        return Value(std::numeric_limits<double>::quiet_NaN());
                    }
                    if (s == "+inf") {
                        return Value(std::numeric_limits<double>::infinity());
                    }
                    if (s == "-inf") {
                        return Value(-std::numeric_limits<double>::infinity());
                    }
                    throw TypeMismatch("unknown $f value '" + s + "'");
                }
                if (key == "$map" && body.is_array()) {
                    std::vector<MapEntry> entries;
                    for (const auto& pair : body) {
                        if (!pair.is_array() || pair.size() != 2) {
                            throw TypeMismatch("$map entries must be [key, value] pairs");
                        }
                        entries.emplace_back(from_json(pair[0]), from_json(pair[1]));
                    }
                    return Value::map(std::move(entries));
                }
            }
            std::vector<MapEntry> entries;
            entries.reserve(j.size());
            for (const auto& [k, val] : j.items()) {
                entries.emplace_back(Value(k), from_json(val));
            }
            return Value::map(std::move(entries));
        }
        default: throw TypeMismatch("unsupported JSON value");
    }
}

auto open_input(const std::filesystem::path& path) -> std::ifstream {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return in;
}

auto is_blank(std::string_view s) -> bool {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Cell typing for unquoted CSV cells.
auto type_cell(const std::string& cell) -> Value {
    if (cell.empty()) {
        return Value();
    }
    const char* first = cell.data();
    const char* last = first + cell.size();
    const char* digits = first + ((*first == '-' || *first == '+') ? 1 : 0);
    bool all_digits = digits != last;
    for (const char* p = digits; p != last; ++p) {
        if (*p < '0' || *p > '9') {
            all_digits = false;
            break;
        }
    }
    if (all_digits) {
        std::int64_t i = 0;
        auto res = std::from_chars(*first == '+' ? first + 1 : first, last, i);
        if (res.ec == std::errc() && res.ptr == last) {
            return Value(i);
        }
    }
    // Decimal literal: digits, optional fraction, optional exponent.
    const char* p = digits;
    bool mantissa = false;
    while (p != last && *p >= '0' && *p <= '9') {
        ++p;
        mantissa = true;
    }
    if (p != last && *p == '.') {
        ++p;
        while (p != last && *p >= '0' && *p <= '9') {
            ++p;
            mantissa = true;
        }
    }
    if (mantissa && p != last && (*p == 'e' || *p == 'E')) {
        const char* q = p + 1;
        if (q != last && (*q == '+' || *q == '-')) {
            ++q;
        }
        const char* exp_digits = q;
        while (q != last && *q >= '0' && *q <= '9') {
            ++q;
        }
        if (q != exp_digits) {
            p = q;
        }
    }
    if (mantissa && p == last) {
        double d = 0;
        auto res = std::from_chars(*first == '+' ? first + 1 : first, last, d);
        if (res.ec == std::errc() && res.ptr == last) {
            return Value(d);
        }
    }
    return Value(cell);
}

struct CsvCell {
    std::string text;
    bool quoted = false;
};

// Splits CSV text into records; quoted fields may contain commas, doubled
// quotes and line breaks. Records are reported with their starting line.
auto parse_csv(const std::string& text, const std::string& path)
    -> std::vector<std::pair<std::size_t, std::vector<CsvCell>>> {
    std::vector<std::pair<std::size_t, std::vector<CsvCell>>> records;
    std::vector<CsvCell> record;
    CsvCell cell;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool in_quotes = false;
    bool record_has_content = false;

    auto end_cell = [&] {
        record.push_back(std::move(cell));
        cell = CsvCell{};
    };
    auto end_record = [&] {
        end_cell();
        if (record_has_content) {
            records.emplace_back(record_line, std::move(record));
        }
        record.clear();
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.text.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                cell.text.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cell.text.empty() || cell.quoted) {
                    throw DataError(path, line, "unexpected quote inside a field");
                }
                cell.quoted = true;
                in_quotes = true;
                record_has_content = true;
                break;
            case ',':
                record_has_content = true;
                end_cell();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                record_line = line;
                break;
            default:
                if (cell.quoted) {
                    throw DataError(path, line, "text after closing quote");
                }
                cell.text.push_back(c);
                record_has_content = true;
        }
    }
    if (in_quotes) {
        throw DataError(path, record_line, "unterminated quoted field");
    }
    end_record();
    return records;
}

}  // namespace

auto to_json_line(const Value& v) -> std::string {
    return to_json(v).dump(-1, ' ', false, json::error_handler_t::replace);
}

auto from_json_line(std::string_view line) -> Value {
    try {
        return from_json(json::parse(line));
    } catch (const json::exception& e) {
        throw DataError("<string>", 1, e.what());
    } catch (const TypeMismatch& e) {
        throw DataError("<string>", 1, e.what());
    }
}

auto load_jsonl(const std::filesystem::path& path) -> Table {
    auto in = open_input(path);
    ValueList rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) {
            continue;
        }
        try {
            rows.push_back(from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw DataError(path.string(), lineno, e.what());
        } catch (const TypeMismatch& e) {
            throw DataError(path.string(), lineno, e.what());
        }
    }
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return Table(std::move(rows));
}

auto load_csv(const std::filesystem::path& path, bool header) -> Table {
    auto in = open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto records = parse_csv(buf.str(), path.string());

    auto typed = [](const CsvCell& c) { return c.quoted ? Value(c.text) : type_cell(c.text); };

    ValueList rows;
    if (records.empty()) {
        return Table();
    }
    std::size_t width = records.front().second.size();
    std::vector<std::string> names;
    std::size_t first = 0;
    if (header) {
        for (const auto& c : records.front().second) {
            names.push_back(c.text);
        }
        first = 1;
    }
    for (std::size_t r = first; r < records.size(); ++r) {
        const auto& [line, cells] = records[r];
        if (cells.size() != width) {
            throw RaggedRow(path.string(), line, cells.size(), width);
        }
        if (header) {
            std::vector<MapEntry> entries;
            for (std::size_t c = 0; c < width; ++c) {
                entries.emplace_back(Value(names[c]), typed(cells[c]));
            }
            rows.push_back(Value::map(std::move(entries)));
        } else {
            ValueList items;
            for (const auto& c : cells) {
                items.push_back(typed(c));
            }
            rows.push_back(Value::list(std::move(items)));
        }
    }
    return Table(std::move(rows));
}

auto load(const DatasetSource& src) -> Table {
    return src.format == Format::Csv ? load_csv(src.path, src.header) : load_jsonl(src.path);
}

void save_jsonl(const Table& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    for (const auto& row : t) {
        out << to_json_line(row) << '\n';
    }
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

}  // namespace objql::ingest
