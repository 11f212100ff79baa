#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A predicate was applied to a value of the wrong attribute kind.
class TypeError : public Error {
public:
    using Error::Error;
};

/// A literal set contains both a literal and its negation.
class InconsistentConjunction : public Error {
public:
    using Error::Error;
};

/// A rule or value violates a structural invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The conditional probability of a rule is undefined (premise never holds).
class UndefinedMeasure : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

/// An answer contradicts monotone closure. Names the conflicting pair.
class InconsistentAnswer : public Error {
public:
    InconsistentAnswer(std::string vector, int value, std::string conflicting, int conflicting_value)
        : Error("answer " + vector + "=" + std::to_string(value) + " contradicts " + conflicting + "=" +
                std::to_string(conflicting_value)),
          vector_(std::move(vector)),
          value_(value),
          conflicting_(std::move(conflicting)),
          conflicting_value_(conflicting_value) {}

    const std::string& vector() const { return vector_; }
    int value() const { return value_; }
    const std::string& conflicting() const { return conflicting_; }
    int conflicting_value() const { return conflicting_value_; }
    /// Asked vector whose answer determined the conflicting value; empty when unknown.
    const std::string& source() const { return source_; }
    void set_source(std::string source) { source_ = std::move(source); }

private:
    std::string vector_;
    int value_;
    std::string conflicting_;
    int conflicting_value_;
    std::string source_;
};

/// An answer was submitted for a vector that is not the pending question.
class SequencingError : public Error {
public:
    using Error::Error;
};

/// Case-table ingestion failure. Row and column are 1-based; 0 means "not applicable".
class LoadError : public Error {
public:
    LoadError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        std::string out = what;
        if (row != 0) out += " (row " + std::to_string(row);
        if (column != 0) out += (row != 0 ? ", column " : " (column ") + std::to_string(column);
        if (row != 0 || column != 0) out += ")";
        return out;
    }

    std::size_t row_;
    std::size_t column_;
};

/// Stored document is malformed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Stored document has a schema version this build cannot read.
class VersionError : public Error {
public:
    using Error::Error;
};

}  // namespace spi
