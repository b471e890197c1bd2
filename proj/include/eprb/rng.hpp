#pragma once

#include <cstdint>

namespace eprb {

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant)
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

} // namespace detail

/// Combine a seed with a stream index into a new 64-bit seed.
/// Pure mixing hash; used to carve disjoint sub-streams out of one user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return detail::mix64(seed + detail::kGolden * (index + 1));
}

/// Counter-based pseudo-random stream.
///
/// A source is identified by (seed, stream); identical identities produce
/// identical value sequences on every platform and at any thread count.
/// Parallel code never shares a source: each unit of work runs on its own
/// stream obtained through derive(), which is a pure function of the parent
/// identity and the index.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          key_(derive_seed(seed, stream)), state_(key_) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Child stream indexed by `index`. Independent of how many values have
    /// been drawn from this source so far.
    RandomSource derive(std::uint64_t index) const {
        return RandomSource(key_, index);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;   // mixed identity, never advances
    std::uint64_t state_; // advances on draws
};

/// Free-function spelling of RandomSource::derive, for call sites that treat
/// the source as opaque (per-trial streams in the experiment runner).
inline RandomSource derive_stream(const RandomSource& rng, std::uint64_t trial_index) {
    return rng.derive(trial_index);
}

} // namespace eprb
