#pragma once

#include <cstdint>
#include <cmath>

namespace eprldpc {

/// Counter-based random generator. Every draw is addressed by
/// (key, counter), so trial i of frame f of stream s can be regenerated
/// in isolation and results do not depend on scheduling or worker count.
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    /// Derive a key from up to four stream identifiers (seed, frame, ...).
    static uint64_t derive(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
        uint64_t k = mix(a ^ 0x9e3779b97f4a7c15ULL);
        k = mix(k ^ mix(b ^ 0xbf58476d1ce4e5b9ULL));
        k = mix(k ^ mix(c ^ 0x94d049bb133111ebULL));
        k = mix(k ^ mix(d ^ 0xd6e8feb86659fd93ULL));
        return k;
    }

    uint64_t word(uint64_t counter) const { return mix(key_ ^ (counter * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL)); }

    /// Uniform in [0, 1).
    double uniform(uint64_t counter) const {
        return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t counter, uint64_t n) const {
        return static_cast<uint64_t>(uniform(counter) * static_cast<double>(n)) % n;
    }

    bool bernoulli(uint64_t counter, double prob) const { return uniform(counter) < prob; }

    /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double gaussian(uint64_t counter) const {
        double u1 = uniform(2 * counter);
        double u2 = uniform(2 * counter + 1);
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    // splitmix64 finalizer
    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
};

} // namespace eprldpc
