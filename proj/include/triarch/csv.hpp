#pragma once
// Minimal CSV layer for the on-disk formats. Fields containing commas,
// quotes, or newlines are quoted RFC-4180 style so arbitrary page titles
// survive a round trip. Doubles are written with std::to_chars (shortest
// form that parses back exactly).

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "triarch/error.hpp"

namespace triarch {

class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // One logical record (quoted fields may span physical lines).
    // Returns nullopt at end of input. Blank lines are skipped.
    std::optional<std::vector<std::string>> next() {
        int c = in_.get();
        while (c == '\n' || c == '\r') {
            if (c == '\n') ++line_;
            c = in_.get();
        }
        if (c == std::istream::traits_type::eof()) return std::nullopt;

        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        row_line_ = line_;
        while (true) {
            if (c == std::istream::traits_type::eof()) {
                if (quoted) throw Error(ErrorKind::BadRow, "unterminated quoted field", row_line_);
                fields.push_back(std::move(field));
                return fields;
            }
            char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    int peek = in_.peek();
                    if (peek == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
            } else if (ch == '"' && field.empty()) {
                quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else if (ch == '\n' || ch == '\r') {
                if (ch == '\r' && in_.peek() == '\n') in_.get();
                ++line_;
                fields.push_back(std::move(field));
                return fields;
            } else {
                field.push_back(ch);
            }
            c = in_.get();
        }
    }

    // 1-based physical line the current record started on.
    long row_line() const { return row_line_ + 1; }

private:
    std::istream& in_;
    long line_ = 0;      // newlines consumed so far
    long row_line_ = 0;  // line_ at the start of the current record
};

inline std::string csv_escape(std::string_view field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

// Shortest decimal representation that round-trips.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Fixed-precision form for report columns whose precision is pinned.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
    return v;
}

}  // namespace triarch
