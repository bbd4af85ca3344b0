#include "ccq/resolvability.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ccq/kernels.hpp"
#include "parallel.hpp"

namespace ccq {

namespace {

std::uint64_t context_tag(const char* name, std::uint64_t a, std::uint64_t b) {
    std::uint64_t tag = stream_tag::from_name(name);
    tag = tag * 0x100000001b3ull + a;
    tag = tag * 0x100000001b3ull + b;
    return tag;
}

// Odometer over words of length n with digits in {0, ..., base-1}.
bool next_word(Word& w, std::size_t base) {
    for (std::size_t i = w.size(); i-- > 0;) {
        if (++w[i] < base) return true;
        w[i] = 0;
    }
    return false;
}

double word_probability(const InputDistribution& p, const Word& w) {
    double prob = 1.0;
    for (const std::size_t x : w) prob *= p[x];
    return prob;
}

std::vector<Complex> kron_vector(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

void add_outer_product(ComplexMatrix& acc, const std::vector<Complex>& v) {
    const auto& kern = kernels::active();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == Complex(0.0, 0.0)) continue;
        kern.caxpy_conj(v.size(), v[i].real(), v[i].imag(),
                        reinterpret_cast<const double*>(v.data()),
                        reinterpret_cast<double*>(acc.row(i)));
    }
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (const double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double std_error_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (static_cast<double>(xs.size() - 1) * static_cast<double>(xs.size())));
}

} // namespace

Codebook sample_codebook(const InputDistribution& p, std::size_t n, std::size_t m_size,
                         RngStream& rng) {
    if (n == 0 || m_size == 0) throw ConfigInvalid("codebook needs n >= 1 and M >= 1");
    Codebook c;
    c.n = n;
    c.m_size = m_size;
    c.words.reserve(m_size);
    for (std::size_t m = 0; m < m_size; ++m) c.words.push_back(sample_word(p, n, rng));
    return c;
}

const ComplexMatrix& NfoldCache::get(const Word& xn) {
    auto it = cache_.find(xn);
    if (it != cache_.end()) return it->second;
    auto [pos, inserted] = cache_.emplace(xn, d_nfold(*d_, xn).matrix());
    return pos->second;
}

DensityOperator codebook_output(const Codebook& c, NfoldCache& cache) {
    const double weight = 1.0 / static_cast<double>(c.m_size);
    ComplexMatrix acc;
    bool first = true;
    for (const Word& w : c.words) {
        const ComplexMatrix& state = cache.get(w);
        if (first) {
            acc = ComplexMatrix(state.rows(), state.cols());
            first = false;
        }
        acc.add_scaled(state, weight);
    }
    return DensityOperator::trusted(std::move(acc));
}

DensityOperator codebook_output(const CqChannel& d, const Codebook& c) {
    NfoldCache cache(d);
    return codebook_output(c, cache);
}

double resolvability_distance(const CqChannel& d, const InputDistribution& p, const Codebook& c) {
    const ComplexMatrix target = tensor_power(average_output(d, p).matrix(), c.n);
    return trace_norm(codebook_output(d, c).matrix() - target);
}

double default_epsilon(double rate, double i_pd) {
    return (rate - i_pd) / 8.0;
}

ExponentReport theoretical_exponent(const CqChannel& d, const InputDistribution& p, double rate,
                                    double epsilon, const AlphaGrid& grid) {
    const SpectralKernel kernel = spectral_kernel(d, p);
    const double h_p = entropy_hp(kernel, p);
    const double h_u = entropy_hu(kernel);
    const double i_pd = h_u - h_p;
    if (!(epsilon > 0.0)) throw RateTooLow("epsilon must be positive");
    if (rate <= i_pd + 4.0 * epsilon)
        throw RateTooLow("rate " + std::to_string(rate) + " <= I(P,D) + 4*eps = " +
                         std::to_string(i_pd + 4.0 * epsilon));

    ExponentReport report;
    report.rate = rate;
    report.epsilon = epsilon;
    report.i_pd = i_pd;
    report.h_p = h_p;
    report.h_u = h_u;
    report.best_value.fill(-std::numeric_limits<double>::infinity());
    report.best_alpha.fill(0.0);

    const auto consider = [&report](int family, double alpha, double value) {
        report.menu.push_back({family, alpha, value});
        if (value > report.best_value[family - 1]) {
            report.best_value[family - 1] = value;
            report.best_alpha[family - 1] = alpha;
        }
    };
    for (const double a : grid.above_one) {
        if (!(a > 1.0)) throw InvalidAlpha("above-one alpha grid entry <= 1");
        consider(1, a, (a - 1.0) * (renyi_conditional(kernel, p, a) + epsilon - h_p));
        consider(3, a, (a - 1.0) * (renyi_output(kernel, a) + epsilon - h_u));
    }
    for (const double a : grid.below_one) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidAlpha("below-one alpha grid entry outside (0,1)");
        consider(2, a, (1.0 - a) * (h_p + epsilon - renyi_conditional(kernel, p, a)));
        consider(4, a, (1.0 - a) * (h_u + epsilon - renyi_output(kernel, a)));
    }

    double gamma1 = std::numeric_limits<double>::infinity();
    for (int f = 0; f < 4; ++f) {
        if (!(report.best_value[f] > 0.0))
            throw NoPositiveExponent("exponent family " + std::to_string(f + 1) +
                                     " has no positive entry on the alpha grid");
        gamma1 = std::min(gamma1, report.best_value[f]);
    }
    report.gamma1 = gamma1;
    report.gamma = std::min(gamma1, 0.5 * (rate - i_pd - 4.0 * epsilon));
    return report;
}

TypicalityProjectors::TypicalityProjectors(const CqChannel& d, const InputDistribution& p,
                                           std::size_t n, double epsilon)
    : n_(n), epsilon_(epsilon), kernel_(spectral_kernel(d, p)) {
    if (n == 0) throw LengthMismatch("typicality projectors need n >= 1");
    if (!(epsilon > 0.0)) throw ConfigInvalid("typicality slack epsilon must be positive");
    h_p_ = entropy_hp(kernel_, p);
    h_u_ = entropy_hu(kernel_);

    product_dim_ = 1;
    for (std::size_t i = 0; i < n_; ++i) {
        if (product_dim_ > max_dim() / kernel_.dim)
            throw DimensionOverflow("typicality projector dimension exceeds max_dim");
        product_dim_ *= kernel_.dim;
    }

    theta_ = ComplexMatrix(product_dim_, product_dim_);
    Word yn(n_, 0);
    std::vector<Complex> basis_col(kernel_.dim);
    do {
        if (!output_typical(yn)) continue;
        ++theta_rank_;
        std::vector<Complex> vec{Complex(1.0, 0.0)};
        for (const std::size_t y : yn) {
            for (std::size_t i = 0; i < kernel_.dim; ++i) basis_col[i] = kernel_.output_basis(i, y);
            vec = kron_vector(vec, basis_col);
        }
        add_outer_product(theta_, vec);
    } while (next_word(yn, kernel_.dim));
}

bool TypicalityProjectors::output_typical(const Word& yn) const {
    double neg_log = 0.0;
    for (const std::size_t y : yn) {
        const double u = kernel_.output_spectrum[y];
        if (u <= 0.0) return false;
        neg_log -= std::log(u);
    }
    const double nn = static_cast<double>(n_);
    return neg_log > nn * (h_u_ - epsilon_) && neg_log < nn * (h_u_ + epsilon_);
}

bool TypicalityProjectors::joint_typical(const Word& xn, const Word& yn) const {
    double neg_log = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double v = kernel_.eigenvalue_table[xn[i]][yn[i]];
        if (v <= 0.0) return false;
        neg_log -= std::log(v);
    }
    const double nn = static_cast<double>(n_);
    return neg_log > nn * (h_p_ - epsilon_) && neg_log < nn * (h_p_ + epsilon_);
}

ComplexMatrix TypicalityProjectors::psi(const Word& xn) const {
    if (xn.size() != n_) throw LengthMismatch("psi: word length differs from n");
    ComplexMatrix out(product_dim_, product_dim_);
    Word yn(n_, 0);
    std::vector<Complex> basis_col(kernel_.dim);
    do {
        if (!joint_typical(xn, yn)) continue;
        std::vector<Complex> vec{Complex(1.0, 0.0)};
        for (std::size_t i = 0; i < n_; ++i) {
            const ComplexMatrix& basis = kernel_.basis_table[xn[i]];
            for (std::size_t r = 0; r < kernel_.dim; ++r) basis_col[r] = basis(r, yn[i]);
            vec = kron_vector(vec, basis_col);
        }
        add_outer_product(out, vec);
    } while (next_word(yn, kernel_.dim));
    return out;
}

ComplexMatrix TypicalityProjectors::gamma(const Word& xn) const {
    return multiply(theta_, psi(xn));
}

TypicalBoundsReport check_typical_bounds(const CqChannel& d, const InputDistribution& p,
                                         std::size_t n, double epsilon,
                                         const std::vector<Word>& words) {
    const TypicalityProjectors proj(d, p, n, epsilon);
    const double nn = static_cast<double>(n);
    TypicalBoundsReport report;
    report.words_checked = words.size();

    const double item1_scale = std::exp(-nn * (proj.h_p() - epsilon));
    for (const Word& xn : words) {
        const ComplexMatrix psi = proj.psi(xn);
        const ComplexMatrix dn = d_nfold(d, xn).matrix();
        ComplexMatrix lhs = multiply(multiply(psi, dn), psi);
        lhs.add_scaled(psi, -item1_scale);
        const auto eig = spectral_decompose(lhs);
        const double top = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
        report.worst_item1 = std::max(report.worst_item1, top);
        if (top > 1e-9) {
            std::string word;
            for (const std::size_t x : xn) word += std::to_string(x);
            throw BoundViolated("typical-term bound (item 1) violated at x^n=" + word +
                                ": max eigenvalue " + std::to_string(top));
        }
    }

    const ComplexMatrix product_state = tensor_power(average_output(d, p).matrix(), n);
    ComplexMatrix lhs2 = multiply(multiply(proj.theta(), product_state), proj.theta());
    lhs2.add_scaled(proj.theta(), -std::exp(-nn * (proj.h_u() - epsilon)));
    const auto eig2 = spectral_decompose(lhs2);
    report.worst_item2 = eig2.eigenvalues.empty() ? 0.0 : eig2.eigenvalues.front();
    if (report.worst_item2 > 1e-9)
        throw BoundViolated("typical-term bound (item 2) violated: max eigenvalue " +
                            std::to_string(report.worst_item2));

    report.theta_trace = proj.theta().trace().real();
    report.theta_trace_bound = std::exp(nn * (proj.h_u() + epsilon));
    if (!(report.theta_trace < report.theta_trace_bound))
        throw BoundViolated("typical-term bound (item 3) violated: tr Theta = " +
                            std::to_string(report.theta_trace) + " not below " +
                            std::to_string(report.theta_trace_bound));
    report.pass = true;
    return report;
}

AtypicalMassReport atypical_mass(const CqChannel& d, const InputDistribution& p, std::size_t n,
                                 double epsilon, const AlphaGrid& grid,
                                 std::size_t enumeration_budget) {
    const std::size_t x_count = d.input_size();
    const std::size_t dim = d.dim();
    double terms = 1.0;
    for (std::size_t i = 0; i < n; ++i) terms *= static_cast<double>(x_count * dim);
    if (terms > static_cast<double>(enumeration_budget))
        throw EnumerationBudgetExceeded("atypical_mass enumeration needs " +
                                        std::to_string(terms) + " terms, budget " +
                                        std::to_string(enumeration_budget));

    const TypicalityProjectors proj(d, p, n, epsilon);
    const SpectralKernel& kernel = proj.kernel();

    AtypicalMassReport report;
    // exact output mass
    {
        Word yn(n, 0);
        do {
            if (proj.output_typical(yn)) continue;
            double u = 1.0;
            for (const std::size_t y : yn) u *= kernel.output_spectrum[y];
            report.exact_output_mass += u;
        } while (next_word(yn, dim));
    }
    // exact joint mass and the split inequality
    {
        Word xn(n, 0);
        do {
            const double px = word_probability(p, xn);
            if (px > 0.0) {
                double atypical = 0.0;
                Word yn(n, 0);
                do {
                    if (proj.joint_typical(xn, yn)) continue;
                    double v = 1.0;
                    for (std::size_t i = 0; i < n; ++i)
                        v *= kernel.eigenvalue_table[xn[i]][yn[i]];
                    atypical += v;
                } while (next_word(yn, dim));
                report.exact_joint_mass += px * atypical;

                const ComplexMatrix dn = d_nfold(d, xn).matrix();
                const ComplexMatrix gam = proj.gamma(xn);
                report.expected_gamma_trace +=
                    px * multiply(dn, gam.adjoint()).trace().real();
            }
        } while (next_word(xn, x_count));
    }

    const double nn = static_cast<double>(n);
    const double h_p = proj.h_p();
    const double h_u = proj.h_u();
    report.pass = true;
    for (const double a1 : grid.above_one) {
        for (const double a2 : grid.below_one) {
            AtypicalMassReport::BoundRow row;
            row.alpha_high = a1;
            row.alpha_low = a2;
            row.joint = true;
            const double e1 = (a1 - 1.0) * (renyi_conditional(kernel, p, a1) + epsilon - h_p);
            const double e2 = (1.0 - a2) * (h_p + epsilon - renyi_conditional(kernel, p, a2));
            row.bound = std::exp(-nn * e1) + std::exp(-nn * e2);
            row.pass = report.exact_joint_mass <= row.bound + 1e-12;
            report.pass = report.pass && row.pass;
            report.bounds.push_back(row);

            AtypicalMassReport::BoundRow out_row;
            out_row.alpha_high = a1;
            out_row.alpha_low = a2;
            out_row.joint = false;
            const double e3 = (a1 - 1.0) * (renyi_output(kernel, a1) + epsilon - h_u);
            const double e4 = (1.0 - a2) * (h_u + epsilon - renyi_output(kernel, a2));
            out_row.bound = std::exp(-nn * e3) + std::exp(-nn * e4);
            out_row.pass = report.exact_output_mass <= out_row.bound + 1e-12;
            report.pass = report.pass && out_row.pass;
            report.bounds.push_back(out_row);
        }
    }

    report.split_pass = report.expected_gamma_trace >=
                        1.0 - report.exact_joint_mass - report.exact_output_mass - 1e-10;
    report.pass = report.pass && report.split_pass;
    if (!report.pass)
        throw BoundViolated("atypical-mass bound violated: joint mass " +
                            std::to_string(report.exact_joint_mass) + ", output mass " +
                            std::to_string(report.exact_output_mass) + ", split " +
                            std::to_string(report.expected_gamma_trace));
    return report;
}

SymmetrizationReport symmetrization_check(const std::vector<std::pair<double, ComplexMatrix>>& t,
                                          std::size_t ell, std::size_t trials, RngStream& rng) {
    if (t.empty()) throw ConfigInvalid("symmetrization_check needs a non-empty distribution");
    if (ell == 0 || trials == 0)
        throw ConfigInvalid("symmetrization_check needs ell >= 1 and trials >= 1");
    const std::size_t rows = t.front().second.rows();
    const std::size_t cols = t.front().second.cols();

    ComplexMatrix mean(rows, cols);
    ComplexMatrix adj_first(cols, cols); // E T^dagger T
    ComplexMatrix adj_last(rows, rows);  // E T T^dagger
    double total = 0.0;
    for (const auto& [prob, mat] : t) {
        if (prob < 0.0) throw ConfigInvalid("negative probability in T distribution");
        total += prob;
        mean.add_scaled(mat, prob);
        adj_first.add_scaled(multiply(mat.adjoint(), mat), prob);
        adj_last.add_scaled(multiply(mat, mat.adjoint()), prob);
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigInvalid("T distribution probabilities sum to " + std::to_string(total));

    const double inv_ell = 1.0 / static_cast<double>(ell);
    adj_first *= Complex(inv_ell, 0.0);
    adj_last *= Complex(inv_ell, 0.0);

    SymmetrizationReport report;
    report.ell = ell;
    report.trials = trials;
    report.rhs_adjoint_first = 2.0 * matrix_sqrt(adj_first).trace().real();
    report.rhs_adjoint_last = 2.0 * matrix_sqrt(adj_last).trace().real();

    std::vector<double> cdf;
    cdf.reserve(t.size());
    double cum = 0.0;
    for (const auto& [prob, mat] : t) {
        cum += prob;
        cdf.push_back(cum);
    }

    std::vector<double> samples(trials);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        ComplexMatrix acc(rows, cols);
        for (std::size_t i = 0; i < ell; ++i) {
            const double u = rng.next_double();
            std::size_t idx = 0;
            while (idx + 1 < cdf.size() && u >= cdf[idx]) ++idx;
            acc.add_scaled(t[idx].second, inv_ell);
        }
        samples[trial] = trace_norm(acc - mean);
    }
    report.lhs_mean = mean_of(samples);
    report.lhs_std_error = std_error_of(samples, report.lhs_mean);
    report.pass = report.lhs_mean <= std::min(report.rhs_adjoint_first, report.rhs_adjoint_last) +
                                         3.0 * report.lhs_std_error;
    return report;
}

ResolvabilityResult estimate_expected_distance(const CqChannel& d, const InputDistribution& p,
                                               std::size_t n, double rate, std::size_t trials,
                                               std::uint64_t master_seed, unsigned threads,
                                               std::optional<double> epsilon_override,
                                               std::size_t max_codebook_cells) {
    if (trials == 0) throw ConfigInvalid("estimate_expected_distance needs trials >= 1");
    const long double m_real = std::exp(static_cast<long double>(n) * rate);
    const auto m_size = static_cast<std::size_t>(std::ceil(m_real - 1e-9L));
    if (m_size == 0 || static_cast<long double>(m_size) * n > max_codebook_cells)
        throw BudgetExceeded("codebook of " + std::to_string(m_size) + " words x n=" +
                             std::to_string(n) + " exceeds the cell budget");

    ResolvabilityResult result;
    result.n = n;
    result.m_size = m_size;
    result.trials = trials;
    result.rate = rate;
    result.distances.resize(trials);
    result.trial_seeds.resize(trials);

    const ComplexMatrix target = tensor_power(average_output(d, p).matrix(), n);
    const std::uint64_t tag = context_tag("resolve-distance", n, m_size);
    detail::parallel_for_trials(trials, threads, [&](std::size_t trial) {
        RngStream rng = RngStream::derive(master_seed, trial, tag);
        result.trial_seeds[trial] = rng.key();
        const Codebook c = sample_codebook(p, n, m_size, rng);
        result.distances[trial] = trace_norm(codebook_output(d, c).matrix() - target);
    });

    result.mean = mean_of(result.distances);
    result.std_error = std_error_of(result.distances, result.mean);

    const double i_pd = holevo_information(d, p);
    const double epsilon = epsilon_override.value_or(default_epsilon(rate, i_pd));
    if (rate > i_pd + 4.0 * epsilon && epsilon > 0.0) {
        try {
            result.exponent = theoretical_exponent(d, p, rate, epsilon);
        } catch (const NoPositiveExponent&) {
            result.exponent.reset();
        }
    }
    return result;
}

ConcentrationReport concentration_experiment(const CqChannel& d, const InputDistribution& p,
                                             std::size_t n, std::size_t m_size,
                                             std::size_t trials,
                                             const std::vector<double>& thresholds,
                                             std::uint64_t master_seed, unsigned threads,
                                             std::size_t swap_count) {
    if (trials == 0) throw ConfigInvalid("concentration_experiment needs trials >= 1");
    ConcentrationReport report;
    report.n = n;
    report.m_size = m_size;
    report.trials = trials;
    report.swap_count = swap_count;
    report.swap_bound = 2.0 / static_cast<double>(m_size);

    const ComplexMatrix target = tensor_power(average_output(d, p).matrix(), n);
    std::vector<double> distances(trials);
    const std::uint64_t tag = context_tag("concentration", n, m_size);
    detail::parallel_for_trials(trials, threads, [&](std::size_t trial) {
        RngStream rng = RngStream::derive(master_seed, trial, tag);
        const Codebook c = sample_codebook(p, n, m_size, rng);
        distances[trial] = trace_norm(codebook_output(d, c).matrix() - target);
    });
    report.mean = mean_of(distances);

    report.pass = true;
    for (const double t : thresholds) {
        ConcentrationReport::TailRow row;
        row.threshold = t;
        std::size_t hits = 0;
        for (const double dist : distances)
            if (dist - report.mean > t) ++hits;
        row.frequency = static_cast<double>(hits) / static_cast<double>(trials);
        row.bound = std::exp(-t * t * static_cast<double>(m_size) / 2.0);
        row.std_error =
            std::sqrt(row.frequency * (1.0 - row.frequency) / static_cast<double>(trials));
        row.pass = row.frequency <= row.bound + 3.0 * row.std_error;
        report.pass = report.pass && row.pass;
        report.tails.push_back(row);
    }

    const std::uint64_t swap_tag = context_tag("concentration-swap", n, m_size);
    report.swap_pass = true;
    for (std::size_t k = 0; k < swap_count; ++k) {
        RngStream rng = RngStream::derive(master_seed, k, swap_tag);
        Codebook c = sample_codebook(p, n, m_size, rng);
        NfoldCache cache(d);
        const double before = trace_norm(codebook_output(c, cache).matrix() - target);
        const std::size_t position = rng.next_below(m_size);
        c.words[position] = sample_word(p, n, rng);
        const double after = trace_norm(codebook_output(c, cache).matrix() - target);
        report.swap_max_change = std::max(report.swap_max_change, std::abs(after - before));
    }
    report.swap_pass = report.swap_max_change <= report.swap_bound + 1e-12;
    report.pass = report.pass && report.swap_pass;
    return report;
}

ComplexMatrix exhaustive_codebook_mean(const CqChannel& d, const InputDistribution& p,
                                       std::size_t n, std::size_t m_size, std::size_t budget) {
    double codebooks = 1.0;
    for (std::size_t i = 0; i < n * m_size; ++i) codebooks *= static_cast<double>(d.input_size());
    if (codebooks > static_cast<double>(budget))
        throw BudgetExceeded("exhaustive codebook mean needs " + std::to_string(codebooks) +
                             " codebooks, budget " + std::to_string(budget));

    // Precompute the word list with probabilities and n-fold states.
    std::vector<Word> words;
    std::vector<double> word_probs;
    std::vector<ComplexMatrix> states;
    Word w(n, 0);
    do {
        words.push_back(w);
        word_probs.push_back(word_probability(p, w));
        states.push_back(d_nfold(d, w).matrix());
    } while (next_word(w, d.input_size()));

    const std::size_t dim = states.front().rows();
    const double inv_m = 1.0 / static_cast<double>(m_size);
    ComplexMatrix acc(dim, dim);
    std::vector<std::size_t> slots(m_size, 0);
    for (;;) {
        double weight = 1.0;
        for (const std::size_t s : slots) weight *= word_probs[s];
        if (weight > 0.0) {
            ComplexMatrix dc(dim, dim);
            for (const std::size_t s : slots) dc.add_scaled(states[s], inv_m);
            acc.add_scaled(dc, weight);
        }
        std::size_t i = m_size;
        for (; i-- > 0;) {
            if (++slots[i] < words.size()) break;
            slots[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    return acc;
}

} // namespace ccq
