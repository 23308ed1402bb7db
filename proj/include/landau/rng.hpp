#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace landau {

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC'11).
// Every draw is a pure function of (key, counter); streams are addressed by
// (master seed, purpose tag, indices) so parallel evaluation order never
// matters for reproducibility.

namespace philox {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr,
                                             std::array<uint32_t, 2> key) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

}  // namespace philox

// 64-bit FNV-1a, used to derive stream keys and config hashes.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t mix64(uint64_t a, uint64_t b) {
    // splitmix64 finalizer over a xor-combined pair
    uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27; x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

// A keyed stream: key identifies (seed, purpose); counters are caller indices.
class RngStream {
  public:
    RngStream(uint64_t master_seed, std::string_view purpose)
        : key_(mix64(master_seed, fnv1a64(purpose))) {}
    explicit RngStream(uint64_t raw_key) : key_(raw_key) {}

    // derive a substream (e.g. per replica)
    RngStream substream(uint64_t index) const { return RngStream(mix64(key_, index)); }

    std::array<uint32_t, 4> block(uint64_t c0, uint64_t c1) const {
        const std::array<uint32_t, 4> ctr = {
            static_cast<uint32_t>(c0), static_cast<uint32_t>(c0 >> 32),
            static_cast<uint32_t>(c1), static_cast<uint32_t>(c1 >> 32)};
        const std::array<uint32_t, 2> key = {static_cast<uint32_t>(key_),
                                             static_cast<uint32_t>(key_ >> 32)};
        return philox::philox4x32_10(ctr, key);
    }

    // two iid standard normals addressed by a 128-bit counter
    void normal2(uint64_t c0, uint64_t c1, double& n0, double& n1) const {
        const auto r = block(c0, c1);
        const double u1 = to_open_unit(r[0], r[1]);
        const double u2 = to_open_unit(r[2], r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        n0 = rad * std::cos(ang);
        n1 = rad * std::sin(ang);
    }

    // fill out[0..n) with iid normals, n <= 4
    void normals(uint64_t c0, uint64_t c1, int n, double* out) const {
        double a, b;
        normal2(c0, c1, a, b);
        if (n >= 1) out[0] = a;
        if (n >= 2) out[1] = b;
        if (n >= 3) {
            normal2(c0 | (1ull << 62), c1, a, b);
            out[2] = a;
            if (n >= 4) out[3] = b;
        }
    }

    double uniform(uint64_t c0, uint64_t c1) const {
        const auto r = block(c0, c1);
        return to_open_unit(r[0], r[1]);
    }

    uint64_t key() const { return key_; }

  private:
    static double to_open_unit(uint32_t hi, uint32_t lo) {
        const uint64_t v = (static_cast<uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(v >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    uint64_t key_;
};

}  // namespace landau
