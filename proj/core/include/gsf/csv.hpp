#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsf::csv {

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

/// Splits a line on commas. No quoting: none of the library's schemas need it.
[[nodiscard]] std::vector<std::string_view> split(std::string_view line);

/// Strict full-field parses; nullopt on any trailing garbage.
[[nodiscard]] std::optional<double> parse_double(std::string_view field);
[[nodiscard]] std::optional<long long> parse_integer(std::string_view field);

/// Reads lines, skipping blank lines and `#` comments, and tracks 1-based
/// physical line numbers for error messages.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next data line with any trailing '\r' removed, or nullopt at EOF.
    std::optional<std::string> next();
    [[nodiscard]] std::size_t line_number() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace gsf::csv
