#pragma once

// Counter-based random stream. Every draw is a pure function of
// (seed, stream_index, draw position), so samples can be addressed in any
// order from any thread and still reproduce bit-for-bit. stream_index
// partitions the sample space; parallel workers own disjoint substreams.

#include <cstdint>

namespace pmax {

namespace detail {

// SplitMix64 output mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_index = 0)
        : seed_(seed), stream_(stream_index) {
        const std::uint64_t a = detail::mix64(seed + detail::kGolden);
        const std::uint64_t b = detail::mix64(stream_index + 0xda942042e4dd58b5ULL);
        key_ = detail::mix64(a ^ (b + detail::kGolden + (a << 6) + (a >> 2)));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

    /// Uniform draw at absolute position n, strictly inside (0, 1).
    /// 53-bit resolution; endpoints are unreachable so inverse-cdf
    /// transforms (-log(-log u), Box-Muller) stay finite.
    double unit_at(std::uint64_t n) const {
        const std::uint64_t bits = detail::mix64(key_ + detail::kGolden * (n + 1));
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Sequential draw; advances an internal cursor over unit_at positions.
    double next_unit() { return unit_at(cursor_++); }

    /// Stream with the same seed and stream_index + offset, fresh cursor.
    RngStream substream(std::uint64_t offset) const {
        return RngStream(seed_, stream_ + offset);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t cursor_ = 0;
};

}  // namespace pmax
