#pragma once

#include <cstdint>
#include <vector>

#include "ccq/resolvability.hpp"

namespace ccq {

// L sub-codebooks of M words each; message l is encoded by a uniformly
// random word of sub-codebook l. Rates in nats. Messages are 1-based to
// match the decoder's fallback output of 1.
struct WiretapCode {
    std::size_t n = 0;
    std::size_t message_count = 0;      // L
    std::size_t randomization_size = 0; // M
    double rate = 0.0;                  // R
    double rate_tilde = 0.0;            // R~
    std::uint64_t seed = 0;
    std::vector<Codebook> sub_codebooks;
};

struct DecoderConfig {
    double threshold = 0.0; // nats; decodes pairs with density > n I(P,W) - threshold
};

// Midpoint default: threshold = n (I(P,W) - I(P,D) - R) / 2.
DecoderConfig default_decoder_config(const InputDistribution& p, const ClassicalChannel& w,
                                     const CqChannel& d, std::size_t n, double rate);

// Fixes M = ceil(e^{n R~}) and the largest L with M L <= e^{n(R+R~)}, then
// verifies L >= e^{nR}. Throws RateInfeasible when R~ lies outside
// (I(P,D), I(P,W) - R), InfeasibleBlocklength when no integer pair works at
// this n. All exponential comparisons carry 1e-9 slack.
WiretapCode build_wiretap_code(const InputDistribution& p, const ClassicalChannel& w,
                               const CqChannel& d, std::size_t n, double rate, double rate_tilde,
                               std::uint64_t master_seed);

// Uniformly random word of sub-codebook ell (1-based message).
Word encode(const WiretapCode& code, std::size_t ell, RngStream& rng);

// Joint typicality decoding in terms of information density: returns ell iff
// exactly one pair (ell, m) exceeds the density cutoff, otherwise 1.
std::size_t decode(const WiretapCode& code, const InputDistribution& p, const ClassicalChannel& w,
                   const Word& xhatn, const DecoderConfig& cfg);

struct ErrorTrial {
    std::size_t trial = 0;
    std::size_t message = 0;
    std::size_t decoded = 0;
    bool correct = false;
};

struct ErrorEstimate {
    std::size_t trials = 0;
    double error_rate = 0.0;
    double std_error = 0.0;
    std::vector<ErrorTrial> records;
};

// Monte Carlo over uniform messages, encoder randomness and channel noise.
ErrorEstimate estimate_average_error(const WiretapCode& code, const InputDistribution& p,
                                     const ClassicalChannel& w, const DecoderConfig& cfg,
                                     std::size_t trials, std::uint64_t master_seed,
                                     unsigned threads = 1);

// Per-message eavesdropper states D_{C_ell}.
std::vector<DensityOperator> eavesdropper_states(const WiretapCode& code, const CqChannel& d);

struct SecuritySummary {
    double delta = 0.0;                // max pairwise trace distance
    double max_dist_to_product = 0.0;  // max_ell || D_{C_ell} - D_P^{tensor n} ||
    std::size_t argmax_pair_first = 0; // 1-based messages achieving delta
    std::size_t argmax_pair_second = 0;
};

// Distinguishing security level of the built code; the second field is the
// triangle-inequality certificate whose double upper-bounds delta.
SecuritySummary distinguishing_security(const WiretapCode& code, const CqChannel& d,
                                        const InputDistribution& p);

} // namespace ccq
