#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace minos {

enum class ErrorCode {
    InsufficientData,
    CounterRegression,
    InvalidParameter,
    NoActivity,
    InvalidRecord,
    IncompatibleVectors,
    ZeroVector,
    Conflict,
    AmbiguousSelection,
    NoFeasibleCap,
    InvalidSpec,
    NotFound,
    ParseError,
    SchemaVersion,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI's machine-readable error stream) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure with file/line context. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : Error(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

}  // namespace minos
