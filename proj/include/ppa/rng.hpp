#pragma once

#include <cstdint>
#include <random>

namespace ppa {

// splitmix64 step; used to derive decorrelated per-trial seeds from one
// master seed so parallel and serial execution draw identical streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= index * 0xda942042e4dd58b5ULL;
    return a ^ splitmix64(s);
}

// Seeded generator with self-contained sampling helpers. The standard
// distributions are implementation-defined, so bounded ints and unit
// doubles are produced directly from the raw stream; output is identical
// on every platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_double() < p; }

    // uniform in [0, bound), rejection sampled; bound >= 1
    std::uint64_t uniform_int(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ppa
