#pragma once

#include <cstdint>

namespace skc {

// 64-bit shift/xor/multiply finalizer (SplitMix64 constants). Fixed so that bin
// assignments are reproducible across platforms and builds.
constexpr uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

}  // namespace skc
