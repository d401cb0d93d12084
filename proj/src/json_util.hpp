#pragma once

#include "vsg/errors.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace vsg::detail {

using ojson = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become ParseError with a 1-based line and
/// 0-based column of the offending byte.
inline ojson parse_json(std::string_view text, std::string_view what) {
    try {
        return ojson::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t pos = e.byte == 0 ? 0 : e.byte - 1;
        pos = std::min(pos, text.size());
        std::size_t line = 1;
        std::size_t line_start = 0;
        for (std::size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                line_start = i + 1;
            }
        }
        throw ParseError(std::string(what) + ": " + e.what(), line, pos - line_start);
    }
}

/// Schema error at a JSON location that has no byte position any more.
[[noreturn]] inline void schema_error(std::string_view what, const std::string& message) {
    throw ParseError(std::string(what) + ": " + message, 0, 0);
}

} // namespace vsg::detail
