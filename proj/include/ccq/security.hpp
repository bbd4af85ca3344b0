#pragma once

#include <optional>
#include <vector>

#include "ccq/complex_matrix.hpp"
#include "ccq/rng.hpp"

namespace ccq {

// Partition of the message set {0, ..., L-1} into disjoint non-empty blocks.
struct MessagePartition {
    std::vector<std::vector<std::size_t>> blocks;
};

void validate_partition(const MessagePartition& partition, std::size_t message_count);

// Prior over messages.
struct MessagePrior {
    std::vector<double> probabilities;
};

void validate_prior(const MessagePrior& prior, std::size_t message_count);

// Best blind guess: the heaviest block mass.
double guess_probability(const MessagePartition& partition, const MessagePrior& prior);

// Exact optimal two-outcome measurement success for a binary partition:
// (1 + || S_0 - S_1 ||_tr) / 2 with S_b the prior-weighted block states.
double success_binary(const MessagePartition& partition, const MessagePrior& prior,
                      const std::vector<DensityOperator>& states);

// Pretty-good-measurement success for any partition arity; a feasible
// measurement, hence a lower bound on the optimum. The projector onto the
// kernel of S = sum_b S_b is assigned to the first block.
double success_pgm(const MessagePartition& partition, const MessagePrior& prior,
                   const std::vector<DensityOperator>& states);

struct AdvantageAuditRow {
    std::size_t partition_id = 0;
    std::size_t prior_id = 0;
    std::size_t arity = 0;
    double guess = 0.0;
    double succ_lower = 0.0;                // PGM
    std::optional<double> succ_exact;       // binary partitions only
    double advantage = 0.0;                 // best available success - guess
    double delta_bound = 0.0;               // max pairwise trace distance
    bool pass = false;
};

struct AdvantageAuditReport {
    double delta = 0.0;
    std::vector<AdvantageAuditRow> rows;
    bool all_pass = false;
};

// Checks Succ - Guess <= delta (+1e-9) for every (partition, prior) pair,
// with the exact binary value where available and the PGM lower bound
// otherwise. delta is the max pairwise trace distance between the states.
AdvantageAuditReport advantage_audit(const std::vector<DensityOperator>& states,
                                     const std::vector<MessagePrior>& priors,
                                     const std::vector<MessagePartition>& partitions);

// All 2^{L-1} - 1 binary partitions (message 0 pinned to the first block).
std::vector<MessagePartition> exhaustive_binary_partitions(std::size_t message_count);

// Random binary partitions for L beyond the exhaustive cap.
std::vector<MessagePartition> sampled_binary_partitions(std::size_t message_count,
                                                        std::size_t count, RngStream& rng);

MessagePartition singleton_partition(std::size_t message_count);
MessagePartition trivial_partition(std::size_t message_count);

std::vector<MessagePrior> random_priors(std::size_t message_count, std::size_t count,
                                        RngStream& rng);

} // namespace ccq
