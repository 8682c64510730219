// Shared helpers for the line-oriented text formats: '#' comments,
// key = value lines, and doubles printed with enough digits to round-trip
// binary64 exactly.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcs {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline bool is_comment_or_blank(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

// Splits "key = value"; returns false when there is no '='.
inline bool split_key_value(std::string_view line, std::string& key, std::string& value) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
        return false;
    key = std::string(trim(line.substr(0, eq)));
    value = std::string(trim(line.substr(eq + 1)));
    return true;
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !trim(std::string_view(end)).empty())
        throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || !trim(std::string_view(end)).empty() || text.find('-') != std::string::npos)
        throw std::invalid_argument("not a non-negative integer: '" + text + "'");
    return v;
}

inline long long parse_i64(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || !trim(std::string_view(end)).empty())
        throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

} // namespace qcs
