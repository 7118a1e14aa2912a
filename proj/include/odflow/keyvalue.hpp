#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace odflow {

/// One `key = value` entry with its source line.
struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Parses a plain-text key/value file. Blank lines and lines starting with
/// '#' are skipped; keys and values are trimmed. Throws Error(module, ...)
/// naming the line for a line without '=' or with an empty key.
std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source, std::string_view module);

/// Splits "key=value" as given on a command line.
KeyValue split_assignment(std::string_view text, std::string_view module);

bool parse_bool(std::string_view text, bool& out) noexcept;

} // namespace odflow
