#pragma once

#include <cstdint>
#include <initializer_list>

namespace sbmal {

// splitmix64 output function (Steele, Lea, Flood 2014). Used for seed
// expansion and stream derivation so that every consumer sees a fully
// mixed 64-bit state regardless of how structured the input seed is.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a path of
// integers (e.g. {d_index, n_index, trial}). Deterministic and
// platform-independent; distinct paths give unrelated streams.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> path) {
    uint64_t h = splitmix64(master);
    for (uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

// xoshiro256++ (Blackman & Vigna 2019), seeded through splitmix64.
// All distributions used in the project are hand-rolled on top of
// next()/next_double() so that generated graphs and experiment streams
// are bit-reproducible across standard libraries and platforms.
class Rng {
  public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) {
            x = splitmix64(x);
            word = x;
        }
    }

    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ULL; }

    uint64_t next() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    uint64_t operator()() { return next(); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next() >> 63) != 0; }

    // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps
    // the draw exactly uniform.
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = (0 - bound) % bound;
        uint64_t x = next();
        while (x < threshold) x = next();
        return x % bound;
    }

  private:
    static constexpr uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t state_[4];
};

}  // namespace sbmal
