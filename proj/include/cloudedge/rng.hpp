#ifndef CLOUDEDGE_RNG_HPP
#define CLOUDEDGE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace cloudedge {

// Counter-based seeding: every random stream in a run is derived from the run
// seed plus a few well-known words (slot, device id, purpose tag), so streams
// are independent of each other and of how many draws earlier streams made.
// That keeps runs reproducible and keeps sweep rows stable when the grid grows.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t word) {
    std::uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (word + 1));
    return splitmix64(s);
}

template <typename... Words>
std::uint64_t derive_seed(std::uint64_t seed, Words... words) {
    ((seed = mix_seed(seed, static_cast<std::uint64_t>(words))), ...);
    return seed;
}

// Small deterministic generator over a splitmix64 stream. Distribution mapping
// is inverse-CDF so that draws are monotone in the distribution parameter:
// with the same underlying uniforms, a higher Poisson rate never yields a
// smaller count. Simulations rely on that coupling across sweep grid points.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], inclusive.
    int next_int(int lo, int hi) {
        const double u = next_double();
        const double span = static_cast<double>(hi) - static_cast<double>(lo) + 1.0;
        int v = lo + static_cast<int>(u * span);
        return v > hi ? hi : v;
    }

    // Positive uniform in (lo, hi] on a log scale.
    double next_log_uniform(double lo, double hi) {
        const double u = next_double();
        return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
    }

    // Poisson count via inverse CDF; one uniform per draw.
    int next_poisson(double rate) {
        if (rate <= 0.0) return 0;
        const double u = next_double();
        double p = std::exp(-rate);
        double cdf = p;
        int k = 0;
        // Cap guards against pathological rates; far beyond any mass we sample.
        const int cap = static_cast<int>(rate + 10.0 * std::sqrt(rate) + 32.0);
        while (u > cdf && k < cap) {
            ++k;
            p *= rate / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

private:
    std::uint64_t state_;
};

} // namespace cloudedge

#endif
