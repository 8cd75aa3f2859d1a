#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfp {

/// Real number with 9 significant digits in scientific notation, e.g.
/// "8.50000000e+01". Locale-independent.
std::string format_real(double value);

/// Parses a real written in C-locale notation. Throws ParseError on
/// malformed input or trailing characters.
double parse_real(std::string_view text);

long long parse_integer(std::string_view text);

/// Rounds a value to what format_real/parse_real would reproduce.
double quantize(double value);
void quantize(std::span<double> values);

/// Splits on any run of the given separators; empty fields are dropped.
std::vector<std::string_view> split_fields(std::string_view line, std::string_view separators = " \t");

/// Splits on every occurrence of a single separator, keeping empty fields.
std::vector<std::string_view> split_exact(std::string_view line, char separator);

std::string_view trim(std::string_view text);

/// Splits "key = value" at the first '='; both sides trimmed. Returns false
/// if the line has no '='.
bool split_key_value(std::string_view line, std::string_view& key, std::string_view& value);

/// Whole file as bytes. Throws Error if it cannot be read.
std::string read_file(const std::string& path);
/// Throws Error if the file cannot be written.
void write_file(const std::string& path, std::string_view bytes);

/// 64-bit FNV-1a digest rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

} // namespace mfp
