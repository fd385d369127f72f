#pragma once

#include <array>
#include <cstdint>

namespace fpp {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A fixed
// (counter, key) pair always yields the same 128-bit block, which is what
// makes per-edge sampling order-independent and parallel-safe.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    /// Uniform double in [0, 1) from the first two output words.
    static double uniform01(const Counter& ctr, const Key& key) {
        const Counter out = block(ctr, key);
        const std::uint64_t bits = (std::uint64_t{out[1]} << 32) | out[0];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
};

}  // namespace fpp
