#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace burstwatch {

/// A caller broke an operation's precondition (schema mismatch, out-of-order
/// minutes, zero tweet count on a triggered hashtag, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid run configuration or missing required artifact/table.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A single stream record could not be parsed. The stream continues; the
/// error carries the 1-based line number for diagnostics.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line_no, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no) {}

    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

/// Labels were requested for a lifecycle cycle whose outcome is not yet known.
class NotResolvedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training data cannot support the requested fit (single class, too few rows).
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A ratio whose denominator is empty (e.g. statistics over zero bursting hashtags).
class UndefinedRatioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace burstwatch
