#include "mfp/text_format.hpp"

#include "mfp/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfp {

std::string format_real(double value)
{
    if (value == 0.0) {
        // Normalizes negative zero.
        return "0.00000000e+00";
    }
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::scientific, 8);
    if (ec != std::errc{}) {
        throw Error("format_real: conversion failed");
    }
    return std::string(buffer, end);
}

double parse_real(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError("not a real number: '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text)
{
    text = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

double quantize(double value)
{
    if (!std::isfinite(value)) {
        return value;
    }
    return parse_real(format_real(value));
}

void quantize(std::span<double> values)
{
    for (double& v : values) {
        v = quantize(v);
    }
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view separators)
{
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const std::size_t start = line.find_first_not_of(separators, pos);
        if (start == std::string_view::npos) {
            break;
        }
        std::size_t stop = line.find_first_of(separators, start);
        if (stop == std::string_view::npos) {
            stop = line.size();
        }
        fields.push_back(line.substr(start, stop - start));
        pos = stop;
    }
    return fields;
}

std::vector<std::string_view> split_exact(std::string_view line, char separator)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t stop = line.find(separator, start);
        if (stop == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, stop - start));
        start = stop + 1;
    }
}

std::string_view trim(std::string_view text)
{
    constexpr std::string_view blanks = " \t\r\n";
    const std::size_t start = text.find_first_not_of(blanks);
    if (start == std::string_view::npos) {
        return {};
    }
    const std::size_t stop = text.find_last_not_of(blanks);
    return text.substr(start, stop - start + 1);
}

bool split_key_value(std::string_view line, std::string_view& key, std::string_view& value)
{
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
        return false;
    }
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
    return true;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

} // namespace mfp
