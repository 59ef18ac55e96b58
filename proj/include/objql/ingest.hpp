#pragma once

#include <objql/value.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace objql::ingest {

enum class Format { JsonLines, Csv };

struct DatasetSource {
    std::filesystem::path path;
    Format format = Format::JsonLines;
    bool header = true;  // Csv only
};

/// One row per non-empty line, in file order.
///
/// Integer literals that fit in 64 bits load as Int, other numbers as Float.
/// The wrapper objects written by save_jsonl ({"$set": [...]},
/// {"$f": "nan"|"+inf"|"-inf"}, {"$map": [[k, v], ...]}) are decoded back.
/// Throws IoError, or DataError naming the 1-based line.
auto load_jsonl(const std::filesystem::path& path) -> Table;

/// RFC-4180 CSV. Unquoted cells are typed: integral literal -> Int, other
/// decimal literal -> Float, empty -> Null, anything else -> Text. Quoted
/// cells are always Text. Throws IoError, RaggedRow.
auto load_csv(const std::filesystem::path& path, bool header) -> Table;

auto load(const DatasetSource& src) -> Table;

/// Writes one JSON value per line. Round-trips with load_jsonl.
void save_jsonl(const Table& t, const std::filesystem::path& path);

/// Single-line JSON encoding of one value (no trailing newline).
auto to_json_line(const Value& v) -> std::string;
/// Inverse of to_json_line; throws DataError (line 1) on malformed input.
auto from_json_line(std::string_view line) -> Value;

}  // namespace objql::ingest
