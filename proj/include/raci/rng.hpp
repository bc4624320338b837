#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace raci {

// FNV-1a, used to derive independent RNG streams from a run seed plus a
// stream name. No global RNG anywhere; every consumer asks for a named
// stream so output is reproducible regardless of call order.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = fnv1a(name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace raci
