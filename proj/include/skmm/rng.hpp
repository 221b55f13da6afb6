#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace skmm {

// splitmix64 step; used for seeding and for deriving substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with a splitmix64-seeded state. The integer stream is
// bit-identical across platforms; double transforms are deterministic per libm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Independent child stream addressed by (tag, index). Children with distinct
    // addresses are derived through splitmix64 mixing and do not overlap in practice.
    Rng substream(std::uint64_t tag, std::uint64_t index = 0) const {
        std::uint64_t sm = state_[0] ^ (state_[2] * 0x9e3779b97f4a7c15ULL);
        std::uint64_t a = splitmix64(sm) ^ (tag * 0xd1342543de82ef95ULL);
        std::uint64_t b = splitmix64(a) ^ (index * 0xaf251af3b0f025b5ULL);
        return Rng(splitmix64(b));
    }

    std::uint64_t next_u64() {
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

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Widening-multiply rejection (unbiased).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t x = next_u64();
            unsigned __int128 wide = static_cast<unsigned __int128>(x) * n;
            if (static_cast<std::uint64_t>(wide) >= threshold)
                return static_cast<std::uint64_t>(wide >> 64);
        }
    }

    // Standard normal via the Marsaglia polar method (no trig; pairs cached).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// First n entries of a seeded uniform permutation of {0..total-1} (partial
// Fisher-Yates), in draw order.
inline void sample_indices_uniform(std::size_t total, std::size_t n, Rng& rng,
                                   std::vector<std::size_t>& out) {
    std::vector<std::size_t> pool(total);
    for (std::size_t i = 0; i < total; ++i) pool[i] = i;
    out.clear();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(total - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

}  // namespace skmm
