#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "toeplab/error.hpp"

namespace toeplab::text {

/// Shortest decimal text that parses back to the identical double.
inline std::string format_double(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw Error("cannot format floating-point value");
    }
    return std::string(buffer, end);
}

/// Fixed 17-significant-digit text, used for CSV columns.
inline std::string format_g17(double value)
{
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw Error("cannot format floating-point value");
    }
    return std::string(buffer, end);
}

inline double parse_double(std::string_view token)
{
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || token.empty()) {
        throw ParseError("not a number: '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite number: '" + std::string(token) + "'");
    }
    return value;
}

inline long long parse_integer(std::string_view token)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        throw ParseError("not an integer: '" + std::string(token) + "'");
    }
    return value;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char separator)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(separator, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

/// The `family:key=value,key=value` form shared by models and symbols.
struct KeyValueSpec {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

inline KeyValueSpec parse_key_value_spec(std::string_view source)
{
    source = trim(source);
    KeyValueSpec spec;
    const auto colon = source.find(':');
    spec.name = std::string(trim(source.substr(0, colon)));
    if (spec.name.empty()) {
        throw ParseError("missing family name in '" + std::string(source) + "'");
    }
    if (colon == std::string_view::npos) {
        return spec;
    }
    const auto body = source.substr(colon + 1);
    if (trim(body).empty()) {
        return spec;
    }
    for (auto item : split(body, ',')) {
        item = trim(item);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParseError("expected key=value, got '" + std::string(item) + "'");
        }
        std::string key(trim(item.substr(0, eq)));
        for (const auto& [existing, unused] : spec.entries) {
            if (existing == key) {
                throw ParseError("duplicate key '" + key + "'");
            }
        }
        spec.entries.emplace_back(std::move(key), std::string(trim(item.substr(eq + 1))));
    }
    return spec;
}

} // namespace toeplab::text
