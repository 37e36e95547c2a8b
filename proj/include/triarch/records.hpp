#pragma once
// Small record types shared between the parsers and the analytics modules.

#include <cstdint>
#include <string>

namespace triarch {

struct PostRecord {
    std::string page_id;
    std::int64_t timestamp_utc = 0;  // seconds since epoch, UTC
    std::string text;

    friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

// Non-fatal issue raised while loading a file; row is 1-based, 0 = whole file.
struct ValidationWarning {
    long row = 0;
    std::string message;
};

}  // namespace triarch
