#pragma once

namespace triarch {

inline constexpr const char* kVersion = "0.1.0";

// Documented default master seed; nothing is ever seeded from the clock.
inline constexpr unsigned long long kDefaultSeed = 1356;

}  // namespace triarch
