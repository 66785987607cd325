#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unemap::text {

// Shortest text that round-trips at the given number of significant digits.
// 17 digits guarantees a bitwise round trip for IEEE doubles.
std::string format_double(double value, int significant_digits = 17);

// Fixed-point rendering, halves rounded away from zero on the decimal value, used for
// the two-decimal percentage tables.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

// Splits one delimited line. Double-quoted fields may contain the delimiter;
// a doubled quote inside a quoted field is a literal quote.
std::vector<std::string> split_fields(std::string_view line, char delimiter);

std::string join(const std::vector<std::string>& fields, char delimiter);

// Quotes a field when it contains the delimiter, a quote or a line break.
std::string quote_field(std::string_view field, char delimiter);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace unemap::text
