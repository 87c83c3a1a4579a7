#pragma once

#include <cmath>
#include <cstdint>

namespace aplab {

// 64-bit finalizer used throughout for seeding and stream derivation
// (the splitmix64 output function).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a + 0x9E3779B97F4A7C15ull * (b + 0x632BE59BD9B4E019ull));
}

// Counter-based splittable generator: output i of stream (seed, id) is
// mix64(key + i*gamma) with key derived from (seed, id). Streams with
// distinct ids are statistically independent, so replica r of a Monte
// Carlo ensemble can draw from stream (seed, r) and the aggregate does
// not depend on scheduling order.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(hash_combine(mix64(seed + 0xD1B54A32D192ED03ull), stream)), ctr_(0) {}

    std::uint64_t next_u64() {
        ctr_ += 0x9E3779B97F4A7C15ull;
        return mix64(key_ ^ ctr_);
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0,bound). Multiply-shift with rejection, so the result
    // is exactly uniform. bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint64_t poisson(double mean);

private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Exact Poisson sampling. Means up to kChunk are drawn by multiplicative
// inversion; larger means are split into independent Poisson chunks
// (Po(a+b) = Po(a) + Po(b)), which stays exact at any scale.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean)
        : chunks_(static_cast<std::uint64_t>(mean / kChunk)),
          rem_threshold_(std::exp(-(mean - static_cast<double>(chunks_) * kChunk))) {}

    std::uint64_t operator()(RngStream& rng) const {
        std::uint64_t total = 0;
        for (std::uint64_t c = 0; c < chunks_; ++c)
            total += draw(rng, kChunkThreshold);
        return total + draw(rng, rem_threshold_);
    }

    static constexpr double kChunk = 30.0;

private:
    static std::uint64_t draw(RngStream& rng, double threshold) {
        std::uint64_t k = 0;
        double p = rng.next_double();
        while (p > threshold) {
            ++k;
            p *= rng.next_double();
        }
        return k;
    }

    static constexpr double kChunkThreshold = 9.357622968840175e-14;  // exp(-kChunk)

    std::uint64_t chunks_;
    double rem_threshold_;
};

inline std::uint64_t RngStream::poisson(double mean) {
    return PoissonSampler(mean)(*this);
}

}  // namespace aplab
