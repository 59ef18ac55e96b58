#pragma once

#include <cstddef>
#include <optional>
#include <exception>
#include <string>
#include <vector>

namespace objql {

/// Base of every error raised by the library.
///
/// Program evaluation annotates errors with the index of the failing
/// statement before rethrowing, so callers can map failures back to source.
class Error : public std::exception {
public:
    explicit Error(std::string message) : message_(std::move(message)) {}

    auto what() const noexcept -> const char* override { return message_.c_str(); }

    auto statement_index() const -> std::optional<std::size_t> { return statement_; }
    void set_statement_index(std::size_t i) { statement_ = i; }

protected:
    void set_message(std::string m) { message_ = std::move(m); }

private:
    std::string message_;
    std::optional<std::size_t> statement_;
};

/// Wrong value kind for an accessor or builtin.
class TypeMismatch : public Error {
public:
    using Error::Error;
};

class DuplicateName : public Error {
public:
    explicit DuplicateName(const std::string& name)
        : Error("table '" + name + "' is already registered"), name_(name) {}
    auto name() const -> const std::string& { return name_; }

private:
    std::string name_;
};

class UnknownTable : public Error {
public:
    explicit UnknownTable(const std::string& name)
        : Error("unknown table '" + name + "'"), name_(name) {}
    auto name() const -> const std::string& { return name_; }

private:
    std::string name_;
};

/// A user-defined function failed while an operator was applying it.
class UdfError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    UdfError(std::size_t op_index, std::size_t row_index, std::string message)
        : Error(compose(op_index, row_index, message)),
          op_index_(op_index),
          row_index_(row_index),
          message_(std::move(message)) {}

    auto op_index() const -> std::size_t { return op_index_; }
    auto row_index() const -> std::size_t { return row_index_; }
    auto message() const -> const std::string& { return message_; }

    /// Query evaluation fills in the operator position before rethrowing.
    void set_op_index(std::size_t op_index) {
        op_index_ = op_index;
        set_message(compose(op_index_, row_index_, message_));
    }

protected:
    static auto compose(std::size_t op, std::size_t row, const std::string& msg) -> std::string {
        std::string s = "udf failed";
        if (op != npos) {
            s += " in operator " + std::to_string(op);
        }
        if (row != npos) {
            s += " at row " + std::to_string(row);
        }
        return s + ": " + msg;
    }

private:
    std::size_t op_index_;
    std::size_t row_index_;
    std::string message_;
};

/// A filter predicate produced a non-Bool.
class PredicateTypeError : public UdfError {
public:
    using UdfError::UdfError;
};

/// A batch function returned a different number of outputs than inputs.
class BatchArityError : public UdfError {
public:
    using UdfError::UdfError;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input data (a bad line of JSON, a ragged CSV row).
class DataError : public Error {
public:
    DataError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
    auto line() const -> std::size_t { return line_; }

private:
    std::size_t line_;
};

class RaggedRow : public DataError {
public:
    RaggedRow(const std::string& path, std::size_t row, std::size_t got, std::size_t want)
        : DataError(path, row,
                    "row has " + std::to_string(got) + " cells, expected " + std::to_string(want)) {}
};

struct SourcePos {
    int line = 1;
    int col = 1;

    friend auto operator==(const SourcePos&, const SourcePos&) -> bool = default;
};

/// Lexing, parsing and compile errors in query scripts carry a source position.
class SourceError : public Error {
public:
    SourceError(SourcePos pos, const std::string& what)
        : Error("line " + std::to_string(pos.line) + ", col " + std::to_string(pos.col) + ": " +
                what),
          pos_(pos) {}
    auto pos() const -> SourcePos { return pos_; }

private:
    SourcePos pos_;
};

class LexError : public SourceError {
public:
    using SourceError::SourceError;
};

class ParseError : public SourceError {
public:
    ParseError(SourcePos pos, const std::string& what, std::vector<std::string> expected)
        : SourceError(pos, what), expected_(std::move(expected)) {}
    auto expected() const -> const std::vector<std::string>& { return expected_; }

private:
    std::vector<std::string> expected_;
};

class CompileError : public SourceError {
public:
    using SourceError::SourceError;
};

/// Runtime failure inside a compiled expression.
class EvalError : public Error {
public:
    using Error::Error;
};

}  // namespace objql
