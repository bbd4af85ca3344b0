#include "ccq/wiretap.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"

namespace ccq {

namespace {

constexpr double kRoundingSlack = 1e-9;

std::uint64_t wiretap_tag(const char* name, std::uint64_t a) {
    return stream_tag::from_name(name) * 0x100000001b3ull + a;
}

} // namespace

DecoderConfig default_decoder_config(const InputDistribution& p, const ClassicalChannel& w,
                                     const CqChannel& d, std::size_t n, double rate) {
    const double i_pw = mutual_information_classical(p, w);
    const double i_pd = holevo_information(d, p);
    DecoderConfig cfg;
    cfg.threshold = static_cast<double>(n) * (i_pw - i_pd - rate) / 2.0;
    if (!(cfg.threshold > 0.0 && cfg.threshold < static_cast<double>(n) * i_pw))
        throw ConfigInvalid("decoder threshold " + std::to_string(cfg.threshold) +
                            " outside (0, n I(P,W))");
    return cfg;
}

WiretapCode build_wiretap_code(const InputDistribution& p, const ClassicalChannel& w,
                               const CqChannel& d, std::size_t n, double rate, double rate_tilde,
                               std::uint64_t master_seed) {
    if (n == 0) throw ConfigInvalid("block length must be >= 1");
    if (!(rate > 0.0)) throw RateInfeasible("message rate must be positive");
    const double i_pw = mutual_information_classical(p, w);
    const double i_pd = holevo_information(d, p);
    if (!(rate < i_pw - i_pd))
        throw RateInfeasible("rate " + std::to_string(rate) + " >= I(P,W) - I(P,D) = " +
                             std::to_string(i_pw - i_pd));
    if (!(rate_tilde > i_pd && rate_tilde < i_pw - rate))
        throw RateInfeasible("rate_tilde " + std::to_string(rate_tilde) + " outside (" +
                             std::to_string(i_pd) + ", " + std::to_string(i_pw - rate) + ")");

    const long double nn = static_cast<long double>(n);
    const long double m_target = std::exp(nn * rate_tilde);
    const long double ml_cap = std::exp(nn * (rate + rate_tilde));
    const long double l_target = std::exp(nn * rate);

    const auto m_size = static_cast<std::size_t>(std::ceil(m_target - kRoundingSlack));
    if (m_size == 0) throw InfeasibleBlocklength("sub-codebook size rounds to zero");
    const auto l_count = static_cast<std::size_t>(
        std::floor((ml_cap + kRoundingSlack) / static_cast<long double>(m_size)));
    const long double ml = static_cast<long double>(m_size) * static_cast<long double>(l_count);

    if (l_count == 0 || static_cast<long double>(m_size) < m_target - kRoundingSlack ||
        ml > ml_cap + kRoundingSlack ||
        static_cast<long double>(l_count) < l_target - kRoundingSlack)
        throw InfeasibleBlocklength(
            "no integer (M, L) satisfies the codebook inequalities at n=" + std::to_string(n) +
            ": M=" + std::to_string(m_size) + ", L=" + std::to_string(l_count) +
            ", need L >= " + std::to_string(static_cast<double>(l_target)));

    WiretapCode code;
    code.n = n;
    code.message_count = l_count;
    code.randomization_size = m_size;
    code.rate = rate;
    code.rate_tilde = rate_tilde;
    code.seed = master_seed;
    RngStream rng = RngStream::derive(master_seed, 0, stream_tag::from_name("wiretap-codebook"));
    code.sub_codebooks.reserve(l_count);
    for (std::size_t l = 0; l < l_count; ++l)
        code.sub_codebooks.push_back(sample_codebook(p, n, m_size, rng));
    return code;
}

Word encode(const WiretapCode& code, std::size_t ell, RngStream& rng) {
    if (ell == 0 || ell > code.message_count)
        throw MessageOutOfRange("message " + std::to_string(ell) + " outside 1.." +
                                std::to_string(code.message_count));
    const std::size_t m = rng.next_below(code.randomization_size);
    return code.sub_codebooks[ell - 1].words[m];
}

std::size_t decode(const WiretapCode& code, const InputDistribution& p, const ClassicalChannel& w,
                   const Word& xhatn, const DecoderConfig& cfg) {
    if (xhatn.size() != code.n) throw LengthMismatch("decode: received word length differs from n");
    // An output symbol with zero marginal cannot be typical with any
    // codeword; the fallback keeps the decoder total.
    const std::vector<double> marginal = w.output_marginal(p);
    for (const std::size_t sym : xhatn) {
        if (sym >= w.output_size() || marginal[sym] <= 0.0) return 1;
    }
    const double cutoff =
        static_cast<double>(code.n) * mutual_information_classical(p, w) - cfg.threshold;
    std::size_t hits = 0;
    std::size_t hit_message = 0;
    for (std::size_t l = 0; l < code.message_count; ++l) {
        for (const Word& cw : code.sub_codebooks[l].words) {
            if (information_density(p, w, cw, xhatn) > cutoff) {
                ++hits;
                if (hits > 1) return 1;
                hit_message = l + 1;
            }
        }
    }
    return hits == 1 ? hit_message : 1;
}

ErrorEstimate estimate_average_error(const WiretapCode& code, const InputDistribution& p,
                                     const ClassicalChannel& w, const DecoderConfig& cfg,
                                     std::size_t trials, std::uint64_t master_seed,
                                     unsigned threads) {
    if (trials == 0) throw ConfigInvalid("estimate_average_error needs trials >= 1");
    ErrorEstimate est;
    est.trials = trials;
    est.records.resize(trials);
    const std::uint64_t tag = wiretap_tag("wiretap-error", code.n);
    detail::parallel_for_trials(trials, threads, [&](std::size_t trial) {
        RngStream rng = RngStream::derive(master_seed, trial, tag);
        const std::size_t message = 1 + rng.next_below(code.message_count);
        const Word sent = encode(code, message, rng);
        Word received(code.n);
        for (std::size_t i = 0; i < code.n; ++i) received[i] = w.transmit(sent[i], rng);
        const std::size_t decoded = decode(code, p, w, received, cfg);
        est.records[trial] = {trial, message, decoded, decoded == message};
    });
    std::size_t errors = 0;
    for (const auto& rec : est.records)
        if (!rec.correct) ++errors;
    est.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
    est.std_error =
        std::sqrt(est.error_rate * (1.0 - est.error_rate) / static_cast<double>(trials));
    return est;
}

std::vector<DensityOperator> eavesdropper_states(const WiretapCode& code, const CqChannel& d) {
    NfoldCache cache(d);
    std::vector<DensityOperator> states;
    states.reserve(code.message_count);
    for (const Codebook& c : code.sub_codebooks) states.push_back(codebook_output(c, cache));
    return states;
}

SecuritySummary distinguishing_security(const WiretapCode& code, const CqChannel& d,
                                        const InputDistribution& p) {
    const std::vector<DensityOperator> states = eavesdropper_states(code, d);
    const ComplexMatrix product = tensor_power(average_output(d, p).matrix(), code.n);

    SecuritySummary summary;
    summary.argmax_pair_first = 1;
    summary.argmax_pair_second = states.size() > 1 ? 2 : 1;
    for (std::size_t i = 0; i < states.size(); ++i) {
        summary.max_dist_to_product = std::max(
            summary.max_dist_to_product, trace_norm(states[i].matrix() - product));
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double dist = trace_norm(states[i].matrix() - states[j].matrix());
            if (dist > summary.delta) {
                summary.delta = dist;
                summary.argmax_pair_first = i + 1;
                summary.argmax_pair_second = j + 1;
            }
        }
    }
    return summary;
}

} // namespace ccq
