#pragma once

#include <cmath>
#include <cstdint>

namespace ecfield {

// splitmix64 step; also used to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Substream seed for one generation chunk. The (master seed, chunk index)
// pair fully determines the stream, independent of execution order.
inline std::uint64_t chunk_seed(std::uint64_t master_seed, std::uint64_t chunk_index) {
    std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ULL * (chunk_index + 1));
    return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna), fully specified so streams are
// bit-reproducible across platforms.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        for (auto& word : state_) word = splitmix64(seed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0 so logs are safe.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Standard normal pairs via the Marsaglia polar method.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    void pair(double& z0, double& z1) {
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform01() - 1.0;
            v = 2.0 * rng_.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        z0 = u * f;
        z1 = v * f;
    }

    Xoshiro256pp& engine() { return rng_; }

private:
    Xoshiro256pp rng_;
};

}  // namespace ecfield
