#pragma once

#include <cmath>
#include <cstdint>

namespace splkit {

// Counter-based splitmix64 stream. Every draw is a pure function of the
// state, so identical seeds give identical sequences on any platform and
// per-frame streams can be derived independently of processing order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream for one frame (or one object) of a seeded run.
    static Rng stream(std::uint64_t seed, std::uint64_t id, std::uint64_t tag = 0) {
        Rng r(seed);
        r.state_ = mix(mix(r.state_ ^ 0x9e3779b97f4a7c15ull, id), tag);
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_, 0);
    }

    // [0, 1)
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    double log_uniform(double lo, double hi) {
        if (hi <= lo) return lo;
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // Box-Muller, one value per call; no hidden spare state.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

private:
    static std::uint64_t mix(std::uint64_t x, std::uint64_t salt) {
        x += 0x9e3779b97f4a7c15ull * (salt + 1);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

}  // namespace splkit
