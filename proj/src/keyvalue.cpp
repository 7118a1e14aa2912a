#include "odflow/keyvalue.hpp"

#include "odflow/error.hpp"

#include <fmt/format.h>

namespace odflow {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source, std::string_view module) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw Error(std::string(module), fmt::format("{}:{}: expected key=value", source, number));
        const auto key = trim(text.substr(0, eq));
        if (key.empty()) throw Error(std::string(module), fmt::format("{}:{}: empty key", source, number));
        out.push_back({std::string(key), std::string(trim(text.substr(eq + 1))), number});
    }
    return out;
}

KeyValue split_assignment(std::string_view text, std::string_view module) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty())
        throw Error(std::string(module), fmt::format("expected key=value, got '{}'", text));
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), 0};
}

bool parse_bool(std::string_view text, bool& out) noexcept {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        out = false;
        return true;
    }
    return false;
}

} // namespace odflow
