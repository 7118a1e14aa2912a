#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odflow::csv {

/// One parsed record with its 1-based physical line number.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Minimal RFC 4180 reader: comma separator, double-quote quoting, LF or
/// CRLF line endings. A UTF-8 byte-order mark on the first line is skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Returns false at end of input. Throws Error("ingest", ...) on an
    /// unterminated quoted field.
    bool next(Row& row);

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Strict numeric parsing; the whole field must be consumed.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

} // namespace odflow::csv
