#pragma once
// UTC calendar handling: ISO-8601 parsing (with offset normalization),
// formatting, and calendar-month bucketing. Civil-day conversions follow the
// well-known Howard Hinnant algorithms so no locale or OS tzdata is involved.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace triarch {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    std::int64_t year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
};

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), m, d};
}

inline bool is_leap_year(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return lengths[m - 1];
}

namespace detail {
inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                             unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}
}  // namespace detail

// Parses YYYY-MM-DDTHH:MM:SS[.frac][Z|±hh:mm|±hhmm] ('T' may be a space).
// Result is seconds since the Unix epoch, normalized to UTC; fractional
// seconds are accepted and truncated. Returns nullopt on any malformation,
// including out-of-range calendar fields.
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
    unsigned year, month, day, hour, minute, second;
    if (!detail::parse_fixed_uint(s, 0, 4, year)) return std::nullopt;
    if (s.size() < 19 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    if (s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!detail::parse_fixed_uint(s, 5, 2, month) ||
        !detail::parse_fixed_uint(s, 8, 2, day) ||
        !detail::parse_fixed_uint(s, 11, 2, hour) ||
        !detail::parse_fixed_uint(s, 14, 2, minute) ||
        !detail::parse_fixed_uint(s, 17, 2, second))
        return std::nullopt;
    if (month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    if (second == 60) second = 59;  // fold leap seconds

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }

    std::int64_t offset_seconds = 0;
    if (pos == s.size()) {
        // no designator: treat as UTC
    } else if (s[pos] == 'Z' && pos + 1 == s.size()) {
        // explicit UTC
    } else if (s[pos] == '+' || s[pos] == '-') {
        const bool negative = s[pos] == '-';
        ++pos;
        unsigned oh = 0, om = 0;
        if (!detail::parse_fixed_uint(s, pos, 2, oh)) return std::nullopt;
        pos += 2;
        if (pos < s.size() && s[pos] == ':') ++pos;
        if (pos < s.size()) {
            if (!detail::parse_fixed_uint(s, pos, 2, om)) return std::nullopt;
            pos += 2;
        }
        if (pos != s.size() || oh > 23 || om > 59) return std::nullopt;
        offset_seconds = static_cast<std::int64_t>(oh) * 3600 + om * 60;
        if (negative) offset_seconds = -offset_seconds;
    } else {
        return std::nullopt;
    }

    const std::int64_t days = days_from_civil(static_cast<std::int64_t>(year), month, day);
    const std::int64_t local =
        days * 86400 + static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second;
    return local - offset_seconds;
}

inline std::string format_iso8601(std::int64_t utc_seconds) {
    std::int64_t days = utc_seconds / 86400;
    std::int64_t rem = utc_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const CivilDate cd = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(cd.year), cd.month, cd.day,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// A calendar month in UTC, used for activity bucketing and window bounds.
struct YearMonth {
    std::int64_t year = 1970;
    unsigned month = 1;

    friend bool operator==(const YearMonth& a, const YearMonth& b) {
        return a.year == b.year && a.month == b.month;
    }
    friend bool operator<(const YearMonth& a, const YearMonth& b) {
        return a.year != b.year ? a.year < b.year : a.month < b.month;
    }
    friend bool operator<=(const YearMonth& a, const YearMonth& b) {
        return a == b || a < b;
    }
};

inline YearMonth year_month_of(std::int64_t utc_seconds) {
    std::int64_t days = utc_seconds / 86400;
    if (utc_seconds % 86400 < 0) --days;
    const CivilDate cd = civil_from_days(days);
    return {cd.year, cd.month};
}

// Whole months from a to b; 0 when equal, negative when b precedes a.
inline std::int64_t month_diff(const YearMonth& a, const YearMonth& b) {
    return (b.year - a.year) * 12 + static_cast<std::int64_t>(b.month) -
           static_cast<std::int64_t>(a.month);
}

inline YearMonth add_months(YearMonth ym, std::int64_t n) {
    std::int64_t total = ym.year * 12 + static_cast<std::int64_t>(ym.month) - 1 + n;
    std::int64_t y = total / 12;
    std::int64_t m = total % 12;
    if (m < 0) {
        m += 12;
        --y;
    }
    return {y, static_cast<unsigned>(m) + 1};
}

inline std::string to_string(const YearMonth& ym) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u", static_cast<long long>(ym.year), ym.month);
    return buf;
}

// Parses "YYYY-MM".
inline std::optional<YearMonth> parse_year_month(std::string_view s) {
    unsigned y, m;
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    if (!detail::parse_fixed_uint(s, 0, 4, y) || !detail::parse_fixed_uint(s, 5, 2, m))
        return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{static_cast<std::int64_t>(y), m};
}

}  // namespace triarch
