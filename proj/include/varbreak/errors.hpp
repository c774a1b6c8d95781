#pragma once

#include <stdexcept>
#include <string>

namespace varbreak {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument outside a function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A subsample window does not fit inside the series.
class WindowBoundsError : public Error {
public:
    using Error::Error;
};

/// Sum of squares is zero; the ratio C_k/C_n is undefined.
class DegenerateSeriesError : public Error {
public:
    using Error::Error;
};

/// eta - (C/q)^2 <= 0: the squared residuals are empirically constant.
class ZeroDispersionError : public Error {
public:
    using Error::Error;
};

/// The fitted variance polynomial is not positive on the window.
class NonpositiveVarianceError : public Error {
public:
    NonpositiveVarianceError(const std::string& what, double min_value)
        : Error(what), min_value_(min_value) {}

    double min_value() const noexcept { return min_value_; }

private:
    double min_value_;
};

/// Rank-deficient least-squares design.
class SingularDesignError : public Error {
public:
    SingularDesignError(const std::string& what, int order)
        : Error(what), order_(order) {}

    /// Model order (polynomial p or AR m) whose fit failed.
    int order() const noexcept { return order_; }

private:
    int order_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OrderingError : public Error {
public:
    using Error::Error;
};

class LengthError : public Error {
public:
    using Error::Error;
};

/// Too many Monte Carlo replications failed to produce a statistic.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Wraps a component error with the pipeline stage that raised it.
class PipelineError : public Error {
public:
    PipelineError(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage_(stage) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace varbreak
