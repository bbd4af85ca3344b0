#pragma once

#include <cstdint>
#include <string_view>

namespace ccq {

// Counter-based pseudorandom stream (splitmix64). Each stream is keyed by
// (master_seed, trial_index, module_tag); the output at step i is a hash of
// the keyed counter, so streams never share state and may be created in any
// order. Single consumer per stream.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t key) : state_(key) {}

    static constexpr std::string_view algorithm() { return "splitmix64"; }

    // Stable derivation rule, recorded in run manifests:
    //   key = mix(mix(mix(master) ^ mix(trial)) ^ mix(tag))
    static RngStream derive(std::uint64_t master_seed, std::uint64_t trial_index,
                            std::uint64_t module_tag);

    std::uint64_t key() const { return state_; }

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double next_double();

    // Uniform integer in {0, ..., n-1}, unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller (both uniforms always consumed).
    double next_gaussian();

private:
    std::uint64_t state_ = 0x9e3779b97f4a7c15ull;
};

// Fixed per-module stream tags (FNV-1a of the tag names).
namespace stream_tag {
std::uint64_t from_name(std::string_view name);

inline std::uint64_t codebook() { return from_name("codebook"); }
inline std::uint64_t channel_noise() { return from_name("channel-noise"); }
inline std::uint64_t encoder() { return from_name("encoder"); }
inline std::uint64_t message() { return from_name("message"); }
inline std::uint64_t sampling() { return from_name("sampling"); }
inline std::uint64_t audit() { return from_name("audit"); }
} // namespace stream_tag

} // namespace ccq
