#include "vsg/errors.hpp"

namespace vsg {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidDimensions: return "InvalidDimensions";
    case ErrorKind::CorruptMask: return "CorruptMask";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::PropagationError: return "PropagationError";
    case ErrorKind::JudgeUnavailable: return "JudgeUnavailable";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace vsg
