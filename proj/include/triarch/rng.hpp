#pragma once
// Deterministic random numbers. The engine is std::mt19937_64 (bit-exact by
// the standard); the distributions are hand-rolled because the standard
// library's are not portable across implementations, and every reported
// number in this toolkit must be reproducible from its seed alone.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace triarch {

// SplitMix64, used to spread user seeds and to derive per-worker substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Substream seed for (master, index); independent streams for parallel runs.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound); bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return next_double() < p;
    }

    // Standard normal via Box-Muller (one value per call; the pair's second
    // half is discarded to keep the draw count predictable).
    double normal() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Partial Fisher-Yates: k distinct elements drawn uniformly from items.
    // items is permuted in place; the sample is the first k slots.
    template <class T>
    void partial_shuffle(std::vector<T>& items, std::size_t k) {
        const std::size_t n = items.size();
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(items[i], items[j]);
        }
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        if (!items.empty()) partial_shuffle(items, items.size());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace triarch
