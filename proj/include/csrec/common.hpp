// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace csrec {

// Exit-code mapping: ConfigError -> 1, DataError -> 2, NumericError -> 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace rng {

// splitmix64 finalizer; decorrelates seeds derived from small integers.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t seed, std::uint64_t tag) {
    return mix(seed ^ mix(tag));
}

// One independent stream per (seed, tags...) tuple.
inline std::mt19937_64 engine(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = mix(seed);
    for (std::uint64_t t : tags) s = combine(s, t);
    return std::mt19937_64(s);
}

// Stable stream tags for the different sampling purposes.
enum Stream : std::uint64_t {
    kTruncate = 101,
    kSplit = 102,
    kNegatives = 103,
    kCandidates = 104,
    kInit = 105,
    kShuffle = 106,
    kSimSubsample = 107,
    kSynthetic = 108,
};

}  // namespace rng

// FNV-1a, used for provenance hashes of configs and emitted files.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

}  // namespace csrec
