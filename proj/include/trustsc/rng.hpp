#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace trustsc {

// PCG32: small, fast, and identical output on every platform, which the
// reproducibility contract (byte-identical reruns) requires. std::
// distributions are implementation-defined, so all draws go through here.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = 0;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // [0, bound), unbiased via rejection
    std::uint32_t uniform_u32(std::uint32_t bound) {
        if (bound <= 1) return 0;
        std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // inclusive integer range
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());
        std::uint64_t threshold = (0ULL - span) % span;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return lo + static_cast<std::int64_t>(r % span);
        }
    }

    // [0, 1) with 53-bit resolution
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_u32(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    std::vector<T> sample(const std::vector<T>& pool, std::size_t k) {
        std::vector<T> copy = pool;
        shuffle(copy);
        if (k < copy.size()) copy.resize(k);
        return copy;
    }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// Stable sub-seed derivation (FNV-1a) so that experiment cells, clusters and
// Monte Carlo trials each get an independent, order-free stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ULL;
        }
    };
    mix(master);
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    mix(index);
    return h;
}

}  // namespace trustsc
