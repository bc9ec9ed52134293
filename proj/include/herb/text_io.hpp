#pragma once

// Line-oriented helpers shared by every file format: tab-delimited records
// with an optional '#' comment prefix, strict number parsing, and atomic
// output (write to a sibling temp file, then rename).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unistd.h>
#include <vector>

#include "herb/error.hpp"

namespace herb::io {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view line, char delim = '\t') {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return buf.str();
}

/// One non-blank, non-comment line with its 1-based position in the file.
struct Line {
    std::size_t number;
    std::string text;
};

inline std::vector<Line> content_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto t = trim(raw);
        if (t.empty() || t.front() == '#') continue;
        out.push_back({number, std::move(raw)});
    }
    return out;
}

/// Parsed tab-delimited table. The first content line is the header.
struct DelimitedTable {
    std::vector<std::string> header;
    std::vector<Line> rows;
    std::vector<std::vector<std::string>> cells;

    std::size_t column(std::string_view name, const std::string& source) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ValidationError(source + ": missing column '" + std::string(name) + "'");
    }
};

inline DelimitedTable parse_delimited(const std::string& text, const std::string& source,
                                      const std::vector<std::string>& required_columns) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw ValidationError(source + ": empty file (no header)");
    DelimitedTable table;
    for (auto& h : split(lines.front().text)) table.header.emplace_back(trim(h));
    for (const auto& col : required_columns) (void)table.column(col, source);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split(lines[i].text);
        // Trailing empty optional cells may be dropped by editors.
        while (cells.size() < table.header.size()) cells.emplace_back();
        if (cells.size() != table.header.size())
            throw ValidationError(source + ":" + std::to_string(lines[i].number) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, found " +
                                  std::to_string(cells.size()));
        for (auto& c : cells) c = std::string(trim(c));
        table.rows.push_back(lines[i]);
        table.cells.push_back(std::move(cells));
    }
    return table;
}

inline DelimitedTable read_delimited(const std::filesystem::path& path,
                                     const std::vector<std::string>& required_columns) {
    return parse_delimited(read_file(path), path.string(), required_columns);
}

inline double parse_double(std::string_view s, const std::string& where) {
    double value = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || s.empty())
        throw ValidationError(where + ": not a number: '" + std::string(s) + "'");
    if (!std::isfinite(value)) throw ValidationError(where + ": non-finite value '" + std::string(s) + "'");
    return value;
}

inline long parse_int(std::string_view s, const std::string& where) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ValidationError(where + ": not an integer: '" + std::string(s) + "'");
    return value;
}

/// Shortest representation that round-trips (17 significant digits worst case).
inline std::string format_exact(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Writes `content` to `path` through a temp file in the same directory.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failure on '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

} // namespace herb::io
