#include "ccq/rng.hpp"

#include <cmath>

namespace ccq {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t trial_index,
                            std::uint64_t module_tag) {
    std::uint64_t key = mix64(master_seed + kGamma);
    key = mix64(key ^ mix64(trial_index + kGamma));
    key = mix64(key ^ mix64(module_tag + kGamma));
    return RngStream(key);
}

std::uint64_t RngStream::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t rem = std::uint64_t(-n) % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t v = next_u64();
        if (v >= rem) return v % n;
    }
}

double RngStream::next_gaussian() {
    // Clamp away from 0 so log stays finite.
    double u1 = next_double();
    const double u2 = next_double();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

namespace stream_tag {

std::uint64_t from_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace stream_tag

} // namespace ccq
