#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace avpb {

// Philox-4x32-10 counter block cipher (Salmon et al., SC'11). Stateless:
// a (key, counter) pair maps to four 32-bit words, so streams keyed by
// (seed, replication, stream) are reproducible and order-independent.
struct Philox4x32 {
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 2> key,
                                              std::array<std::uint32_t, 4> ctr) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

// Sequential double-precision draws from one (seed, rep, stream) lane.
// The block counter occupies two counter words; rep and stream the others.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t rep, std::uint32_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          rep_lo_(static_cast<std::uint32_t>(rep)),
          rep_hi_stream_(static_cast<std::uint32_t>(rep >> 32) ^ (stream * 0x85EBCA6Bu)) {}

    std::uint64_t next_u64() {
        if (sub_ == 0) {
            buf_ = Philox4x32::block(key_, {static_cast<std::uint32_t>(block_),
                                            static_cast<std::uint32_t>(block_ >> 32), rep_lo_,
                                            rep_hi_stream_});
            ++block_;
        }
        const int i = 2 * sub_;
        sub_ = (sub_ + 1) % 2;
        return (static_cast<std::uint64_t>(buf_[i]) << 32) | buf_[i + 1];
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the pair partner is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t rep_lo_;
    std::uint32_t rep_hi_stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int sub_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace avpb
