// Error types shared across the library. Input and validation failures derive
// from Error; a broken internal cross-check (a bug, not bad input) raises
// InternalError. The CLI maps the two bases to exit codes 1 and 2.

#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ctxspace {

namespace detail {

inline std::string num_str(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NonFiniteValueError : public Error {
public:
    NonFiniteValueError(const std::string& name, double value)
        : Error(name + " must be finite, got " + detail::num_str(value)) {}
};

class NegativeEntryError : public Error {
public:
    NegativeEntryError(const std::string& label, double value)
        : Error("probability entry " + label + " is negative: " + detail::num_str(value)),
          value_(value) {}
    double value() const { return value_; }

private:
    double value_;
};

class EntryAboveOneError : public Error {
public:
    EntryAboveOneError(const std::string& label, double value)
        : Error("probability entry " + label + " exceeds 1: " + detail::num_str(value)),
          value_(value) {}
    double value() const { return value_; }

private:
    double value_;
};

class SumNotOneError : public Error {
public:
    explicit SumNotOneError(double sum)
        : Error("probability entries sum to " + detail::num_str(sum) + ", expected 1"), sum_(sum) {}
    double sum() const { return sum_; }

private:
    double sum_;
};

class MissingContextError : public Error {
public:
    MissingContextError(int i, int j)
        : Error("no outcome table for context (" + std::to_string(i) + "," + std::to_string(j) +
                ")"),
          i_(i),
          j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_;
    int j_;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
    IndexOutOfRangeError(const std::string& name, int value, int limit)
        : Error(name + " = " + std::to_string(value) + " out of range 1.." +
                std::to_string(limit)) {}
};

class ConditionHasZeroProbabilityError : public Error {
public:
    ConditionHasZeroProbabilityError()
        : Error("conditioning event has probability zero, conditional probability undefined") {}
};

class NotTwoByTwoError : public Error {
public:
    NotTwoByTwoError(int m, int n)
        : Error("operation requires a 2x2 setting grid, family is " + std::to_string(m) + "x" +
                std::to_string(n)) {}
};

class BadSignPatternError : public Error {
public:
    explicit BadSignPatternError(const std::string& why) : Error("bad sign pattern: " + why) {}
};

class EmptyContextError : public Error {
public:
    EmptyContextError(int i, int j)
        : Error("no trials recorded for context (" + std::to_string(i) + "," + std::to_string(j) +
                "), conditional estimate undefined"),
          i_(i),
          j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_;
    int j_;
};

class BadRecordError : public Error {
public:
    BadRecordError(std::size_t record_index, const std::string& why)
        : Error("record " + std::to_string(record_index) + ": " + why),
          record_index_(record_index) {}
    std::size_t record_index() const { return record_index_; }

private:
    std::size_t record_index_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace ctxspace
