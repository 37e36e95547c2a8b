// CSV framing, ISO-8601 parsing, and calendar-month arithmetic.

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "test_util.hpp"
#include "triarch/csv.hpp"
#include "triarch/threads.hpp"
#include "triarch/timeutil.hpp"

using namespace triarch;

TEST_CASE("csv: quoting round-trips awkward fields") {
    Rng rng(99);
    const std::string alphabet = "ab,\"\n\r x";
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::string> fields(1 + rng.next_below(5));
        for (auto& f : fields) {
            const std::size_t len = rng.next_below(12);
            for (std::size_t i = 0; i < len; ++i)
                f.push_back(alphabet[rng.next_below(alphabet.size())]);
        }
        // A record of one empty field is indistinguishable from a blank line.
        if (fields.size() == 1 && fields[0].empty()) continue;
        std::ostringstream out;
        write_csv_row(out, fields);
        std::istringstream in(out.str());
        CsvReader reader(in);
        auto row = reader.next();
        REQUIRE(row.has_value());
        CHECK(*row == fields);
        CHECK_FALSE(reader.next().has_value());
    }
}

TEST_CASE("csv: crlf and blank lines") {
    std::istringstream in("a,b\r\n\r\nc,d\n");
    CsvReader reader(in);
    auto r1 = reader.next();
    REQUIRE(r1.has_value());
    CHECK((*r1)[0] == "a");
    auto r2 = reader.next();
    REQUIRE(r2.has_value());
    CHECK((*r2)[1] == "d");
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, -1.5, 30.27, -97.74, 1e-300, 3.141592653589793}) {
        auto parsed = parse_double(format_double(v));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == v);
    }
}

TEST_CASE("iso8601: accepted forms normalize to UTC") {
    auto utc = parse_iso8601("2025-06-01T12:00:00Z");
    REQUIRE(utc.has_value());
    CHECK(format_iso8601(*utc) == "2025-06-01T12:00:00Z");

    auto offset = parse_iso8601("2025-06-01T14:00:00+02:00");
    REQUIRE(offset.has_value());
    CHECK(*offset == *utc);

    auto negative = parse_iso8601("2025-06-01T07:30:00-04:30");
    REQUIRE(negative.has_value());
    CHECK(*negative == *utc);

    auto compact = parse_iso8601("2025-06-01T14:00:00+0200");
    REQUIRE(compact.has_value());
    CHECK(*compact == *utc);

    auto fractional = parse_iso8601("2025-06-01T12:00:00.123Z");
    REQUIRE(fractional.has_value());
    CHECK(*fractional == *utc);
}

TEST_CASE("iso8601: malformed inputs rejected") {
    CHECK_FALSE(parse_iso8601("2025-13-01T00:00:00Z").has_value());  // month 13
    CHECK_FALSE(parse_iso8601("2025-02-30T00:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601("2025-06-01").has_value());
    CHECK_FALSE(parse_iso8601("2025-06-01T25:00:00Z").has_value());
    CHECK_FALSE(parse_iso8601("not a date").has_value());
    CHECK_FALSE(parse_iso8601("2025-06-01T12:00:00Q").has_value());
    CHECK(parse_iso8601("2024-02-29T00:00:00Z").has_value());  // leap day
    CHECK_FALSE(parse_iso8601("2023-02-29T00:00:00Z").has_value());
}

TEST_CASE("resolve_threads: explicit beats env beats hardware") {
    unsetenv("TRIARCH_THREADS");
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
    setenv("TRIARCH_THREADS", "5", 1);
    CHECK(resolve_threads(0) == 5);
    CHECK(resolve_threads(2) == 2);
    setenv("TRIARCH_THREADS", "garbage", 1);
    CHECK(resolve_threads(0) >= 1);
    unsetenv("TRIARCH_THREADS");
}

TEST_CASE("year-month arithmetic") {
    const auto t = parse_iso8601("2025-06-30T23:59:59Z");
    REQUIRE(t.has_value());
    CHECK(year_month_of(*t) == YearMonth{2025, 6});
    CHECK(month_diff({2025, 1}, {2025, 6}) == 5);
    CHECK(month_diff({2024, 11}, {2025, 2}) == 3);
    CHECK(add_months({2025, 1}, -1) == YearMonth{2024, 12});
    CHECK(to_string(YearMonth{2025, 6}) == "2025-06");
    CHECK(parse_year_month("2019-11") == YearMonth{2019, 11});
    CHECK_FALSE(parse_year_month("2019-13").has_value());
}
