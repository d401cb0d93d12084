#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsg {

enum class ErrorKind {
    InvalidDimensions,
    CorruptMask,
    EmptyMask,
    InvalidParam,
    InvalidSpec,
    InvalidInput,
    EmptyInput,
    PropagationError,
    JudgeUnavailable,
    ParseError,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error thrown by the library. The kind is stable and is what
/// the CLI reports in its machine-readable error record.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class PropagationError : public Error {
public:
    PropagationError(int frame, const std::string& message)
        : Error(ErrorKind::PropagationError,
                "propagation failed at frame " + std::to_string(frame) + ": " + message),
          frame_(frame) {}

    int frame() const noexcept { return frame_; }

private:
    int frame_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t offset)
        : Error(ErrorKind::ParseError, message), line_(line), offset_(offset) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

} // namespace vsg
