#include "ccq/security.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccq {

namespace {

std::vector<ComplexMatrix> block_states(const MessagePartition& partition,
                                        const MessagePrior& prior,
                                        const std::vector<DensityOperator>& states) {
    const std::size_t dim = states.front().dim();
    std::vector<ComplexMatrix> s;
    s.reserve(partition.blocks.size());
    for (const auto& block : partition.blocks) {
        ComplexMatrix acc(dim, dim);
        for (const std::size_t m : block) acc.add_scaled(states[m].matrix(), prior.probabilities[m]);
        s.push_back(std::move(acc));
    }
    return s;
}

} // namespace

void validate_partition(const MessagePartition& partition, std::size_t message_count) {
    std::vector<bool> seen(message_count, false);
    if (partition.blocks.empty()) throw ConfigInvalid("partition has no blocks");
    for (const auto& block : partition.blocks) {
        if (block.empty()) throw ConfigInvalid("partition has an empty block");
        for (const std::size_t m : block) {
            if (m >= message_count)
                throw ConfigInvalid("partition references message " + std::to_string(m));
            if (seen[m]) throw ConfigInvalid("partition blocks are not disjoint");
            seen[m] = true;
        }
    }
    for (std::size_t m = 0; m < message_count; ++m)
        if (!seen[m]) throw ConfigInvalid("partition does not cover message " + std::to_string(m));
}

void validate_prior(const MessagePrior& prior, std::size_t message_count) {
    if (prior.probabilities.size() != message_count)
        throw SizeMismatch("prior size differs from message count");
    double sum = 0.0;
    for (const double p : prior.probabilities) {
        if (!(p >= 0.0)) throw ConfigInvalid("prior has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigInvalid("prior sums to " + std::to_string(sum));
}

double guess_probability(const MessagePartition& partition, const MessagePrior& prior) {
    double best = 0.0;
    for (const auto& block : partition.blocks) {
        double mass = 0.0;
        for (const std::size_t m : block) mass += prior.probabilities[m];
        best = std::max(best, mass);
    }
    return best;
}

double success_binary(const MessagePartition& partition, const MessagePrior& prior,
                      const std::vector<DensityOperator>& states) {
    if (partition.blocks.size() != 2)
        throw PartitionArityError("success_binary needs exactly two blocks, got " +
                                  std::to_string(partition.blocks.size()));
    const auto s = block_states(partition, prior, states);
    return 0.5 * (1.0 + trace_norm(s[0] - s[1]));
}

double success_pgm(const MessagePartition& partition, const MessagePrior& prior,
                   const std::vector<DensityOperator>& states) {
    const auto s = block_states(partition, prior, states);
    const std::size_t dim = states.front().dim();
    ComplexMatrix total(dim, dim);
    for (const auto& sb : s) total += sb;

    // Pseudo-inverse square root on the support of S.
    auto eig = spectral_decompose(total);
    const double top = eig.eigenvalues.empty() ? 0.0 : std::max(eig.eigenvalues.front(), 0.0);
    const double support_tol = 1e-12 * std::max(top, 1.0);
    ComplexMatrix inv_sqrt(dim, dim);
    ComplexMatrix support(dim, dim);
    {
        auto scaled = eig;
        for (double& v : scaled.eigenvalues) v = v > support_tol ? 1.0 / std::sqrt(v) : 0.0;
        inv_sqrt = scaled.reconstruct();
        for (std::size_t j = 0; j < eig.eigenvalues.size(); ++j)
            scaled.eigenvalues[j] = eig.eigenvalues[j] > support_tol ? 1.0 : 0.0;
        support = scaled.reconstruct();
    }

    double success = 0.0;
    for (std::size_t b = 0; b < s.size(); ++b) {
        ComplexMatrix f = multiply(multiply(inv_sqrt, s[b]), inv_sqrt);
        if (b == 0) {
            // Kernel completion keeps the POVM summing to the identity.
            ComplexMatrix kernel_proj = ComplexMatrix::identity(dim);
            kernel_proj -= support;
            f += kernel_proj;
        }
        success += multiply(f, s[b]).trace().real();
    }
    return success;
}

AdvantageAuditReport advantage_audit(const std::vector<DensityOperator>& states,
                                     const std::vector<MessagePrior>& priors,
                                     const std::vector<MessagePartition>& partitions) {
    if (states.empty()) throw ConfigInvalid("advantage_audit needs at least one state");
    AdvantageAuditReport report;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j)
            report.delta =
                std::max(report.delta, trace_norm(states[i].matrix() - states[j].matrix()));

    report.all_pass = true;
    for (std::size_t pi = 0; pi < partitions.size(); ++pi) {
        validate_partition(partitions[pi], states.size());
        for (std::size_t qi = 0; qi < priors.size(); ++qi) {
            validate_prior(priors[qi], states.size());
            AdvantageAuditRow row;
            row.partition_id = pi;
            row.prior_id = qi;
            row.arity = partitions[pi].blocks.size();
            row.guess = guess_probability(partitions[pi], priors[qi]);
            row.succ_lower = success_pgm(partitions[pi], priors[qi], states);
            double best_success = row.succ_lower;
            if (row.arity == 2) {
                row.succ_exact = success_binary(partitions[pi], priors[qi], states);
                best_success = *row.succ_exact;
            }
            row.advantage = best_success - row.guess;
            row.delta_bound = report.delta;
            row.pass = row.advantage <= report.delta + 1e-9;
            report.all_pass = report.all_pass && row.pass;
            report.rows.push_back(row);
        }
    }
    return report;
}

std::vector<MessagePartition> exhaustive_binary_partitions(std::size_t message_count) {
    if (message_count < 2) throw ConfigInvalid("binary partitions need at least two messages");
    if (message_count > 20) throw BudgetExceeded("exhaustive binary partitions capped at L = 20");
    std::vector<MessagePartition> out;
    const std::size_t masks = (std::size_t{1} << (message_count - 1));
    for (std::size_t mask = 1; mask < masks; ++mask) {
        MessagePartition partition;
        partition.blocks.assign(2, {});
        partition.blocks[0].push_back(0); // message 0 pinned: kills complements
        for (std::size_t m = 1; m < message_count; ++m)
            partition.blocks[(mask >> (m - 1)) & 1u].push_back(m);
        out.push_back(std::move(partition));
    }
    return out;
}

std::vector<MessagePartition> sampled_binary_partitions(std::size_t message_count,
                                                        std::size_t count, RngStream& rng) {
    if (message_count < 2) throw ConfigInvalid("binary partitions need at least two messages");
    std::vector<MessagePartition> out;
    out.reserve(count);
    while (out.size() < count) {
        MessagePartition partition;
        partition.blocks.assign(2, {});
        partition.blocks[0].push_back(0);
        for (std::size_t m = 1; m < message_count; ++m)
            partition.blocks[rng.next_below(2)].push_back(m);
        if (partition.blocks[1].empty()) continue;
        out.push_back(std::move(partition));
    }
    return out;
}

MessagePartition singleton_partition(std::size_t message_count) {
    MessagePartition partition;
    for (std::size_t m = 0; m < message_count; ++m) partition.blocks.push_back({m});
    return partition;
}

MessagePartition trivial_partition(std::size_t message_count) {
    MessagePartition partition;
    partition.blocks.emplace_back();
    for (std::size_t m = 0; m < message_count; ++m) partition.blocks[0].push_back(m);
    return partition;
}

std::vector<MessagePrior> random_priors(std::size_t message_count, std::size_t count,
                                        RngStream& rng) {
    std::vector<MessagePrior> priors;
    priors.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        MessagePrior prior;
        prior.probabilities.resize(message_count);
        double sum = 0.0;
        for (double& p : prior.probabilities) {
            p = -std::log(1.0 - rng.next_double());
            sum += p;
        }
        for (double& p : prior.probabilities) p /= sum;
        priors.push_back(std::move(prior));
    }
    return priors;
}

} // namespace ccq
