#pragma once

#include <cstdint>

namespace mim {

// SplitMix64 (Steele/Lea/Flood finalizer). Counter-based: the state advances
// by a fixed odd constant and every output is a bijective scramble of the
// counter, so a seed fully determines the stream and streams from distinct
// seeds are decorrelated by the mixer.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    // Uniform integer in [0, bound), rejection-sampled so every value is
    // exactly equally likely. bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Stream derivation: feeds (master, stream, index) through the SplitMix64
// finalizer with distinct additive offsets, one absorption step per input.
// The result seeds an independent SplitMix64. Used to give every
// (cell, sample) task its own generator so parallel schedules cannot change
// what any task draws.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t h = detail::mix64(master + 0x9e3779b97f4a7c15ULL);
    h = detail::mix64(h ^ (stream + 0xd1b54a32d192ed03ULL));
    h = detail::mix64(h ^ (index + 0x8cb92ba72f3d8dd7ULL));
    return h;
}

}  // namespace mim
