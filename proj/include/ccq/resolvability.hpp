#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ccq/channel.hpp"
#include "ccq/info.hpp"

namespace ccq {

// Standard random codebook: M words of length n drawn i.i.d. from P.
struct Codebook {
    std::size_t n = 0;
    std::size_t m_size = 0;
    std::vector<Word> words;
};

Codebook sample_codebook(const InputDistribution& p, std::size_t n, std::size_t m_size,
                         RngStream& rng);

// Shared cache of n-fold states keyed by word; useful when a codebook
// repeats words (small alphabets) or several codebooks share a channel.
class NfoldCache {
public:
    explicit NfoldCache(const CqChannel& d) : d_(&d) {}
    const ComplexMatrix& get(const Word& xn);

private:
    const CqChannel* d_;
    std::map<Word, ComplexMatrix> cache_;
};

// (1/M) sum_m D^n(C(m))
DensityOperator codebook_output(const CqChannel& d, const Codebook& c);
DensityOperator codebook_output(const Codebook& c, NfoldCache& cache);

// || D_C - D_P^{tensor n} ||_tr, in [0, 2].
double resolvability_distance(const CqChannel& d, const InputDistribution& p, const Codebook& c);

// Alpha grids for the Markov-exponent menu.
struct AlphaGrid {
    std::vector<double> above_one{1.25, 1.5, 2.0, 3.0};
    std::vector<double> below_one{0.5, 0.75, 0.9};
};

struct ExponentEntry {
    int family = 0; // 1..4
    double alpha = 0.0;
    double value = 0.0;
};

// Resolvability rate exponents. gamma1 is the decay rate of the atypical-mass
// bound: each of the four exponent families is maximized over its grid and
// the binding (smallest) family wins, since the bound is a sum of the four
// exponential terms. gamma = min(gamma1, (R - I(P,D) - 4 eps)/2).
struct ExponentReport {
    double rate = 0.0;
    double epsilon = 0.0;
    double i_pd = 0.0;
    double h_p = 0.0;
    double h_u = 0.0;
    std::array<double, 4> best_value{};
    std::array<double, 4> best_alpha{};
    double gamma1 = 0.0;
    double gamma = 0.0;
    std::vector<ExponentEntry> menu;
};

// Throws RateTooLow when R <= I(P,D) + 4 eps (or eps outside its interval),
// NoPositiveExponent when some family has no positive entry on the grid.
ExponentReport theoretical_exponent(const CqChannel& d, const InputDistribution& p, double rate,
                                    double epsilon, const AlphaGrid& grid = AlphaGrid{});

// Default slack: midpoint of the admissible interval (0, (R - I(P,D))/4).
double default_epsilon(double rate, double i_pd);

// Typicality projectors Psi(x^n), Theta and Gamma = Theta Psi for the
// epsilon-windows around H_P and H_U (strict inequalities; zero-probability
// pairs are atypical).
class TypicalityProjectors {
public:
    TypicalityProjectors(const CqChannel& d, const InputDistribution& p, std::size_t n,
                         double epsilon);

    std::size_t n() const { return n_; }
    double epsilon() const { return epsilon_; }
    double h_p() const { return h_p_; }
    double h_u() const { return h_u_; }
    std::size_t product_dim() const { return product_dim_; }
    const SpectralKernel& kernel() const { return kernel_; }

    const ComplexMatrix& theta() const { return theta_; }
    std::size_t theta_rank() const { return theta_rank_; }
    ComplexMatrix psi(const Word& xn) const;
    ComplexMatrix gamma(const Word& xn) const;

    bool output_typical(const Word& yn) const;
    bool joint_typical(const Word& xn, const Word& yn) const;

private:
    std::size_t n_;
    double epsilon_;
    SpectralKernel kernel_;
    double h_p_ = 0.0;
    double h_u_ = 0.0;
    std::size_t product_dim_ = 0;
    ComplexMatrix theta_;
    std::size_t theta_rank_ = 0;
};

// Typical-term operator bounds, by max-eigenvalue checks: the projected
// states are dominated by e^{-n(H-eps)} times the projectors, and the
// output projector trace stays below e^{n(H_U+eps)}.
struct TypicalBoundsReport {
    std::size_t words_checked = 0;
    double worst_item1 = 0.0; // max eigenvalue of Psi D^n Psi - e^{-n(H_P-eps)} Psi
    double worst_item2 = 0.0; // same for Theta D_P^n Theta vs e^{-n(H_U-eps)} Theta
    double theta_trace = 0.0;
    double theta_trace_bound = 0.0; // e^{n(H_U+eps)}, strict upper bound
    bool pass = false;
};

TypicalBoundsReport check_typical_bounds(const CqChannel& d, const InputDistribution& p,
                                         std::size_t n, double epsilon,
                                         const std::vector<Word>& words);

// Atypical-mass check: exact masses by enumeration vs the Markov exponent
// bounds, plus the trace-split inequality
// E tr(D^n Gamma^dagger) >= 1 - P(atypical) - U(atypical).
struct AtypicalMassReport {
    double exact_joint_mass = 0.0;  // P(P^c_{eps,n})
    double exact_output_mass = 0.0; // U(U^c_{eps,n})
    double expected_gamma_trace = 0.0;
    struct BoundRow {
        double alpha_high = 0.0, alpha_low = 0.0;
        double bound = 0.0;
        bool joint = false; // joint vs output family
        bool pass = false;
    };
    std::vector<BoundRow> bounds;
    bool split_pass = false;
    bool pass = false;
};

AtypicalMassReport atypical_mass(const CqChannel& d, const InputDistribution& p, std::size_t n,
                                 double epsilon, const AlphaGrid& grid = AlphaGrid{},
                                 std::size_t enumeration_budget = 1000000);

// Symmetrization inequality: empirical E||T_X - E T_X||_tr against the two
// analytic bounds 2 tr sqrt(E T^dagger T / ell) and the T T^dagger variant.
// T is given as an explicit finite distribution over matrices.
struct SymmetrizationReport {
    std::size_t ell = 0;
    std::size_t trials = 0;
    double lhs_mean = 0.0;
    double lhs_std_error = 0.0;
    double rhs_adjoint_first = 0.0; // 2 tr sqrt(E T^dagger T / ell)
    double rhs_adjoint_last = 0.0;  // 2 tr sqrt(E T T^dagger / ell)
    bool pass = false;
};

SymmetrizationReport symmetrization_check(const std::vector<std::pair<double, ComplexMatrix>>& t,
                                          std::size_t ell, std::size_t trials, RngStream& rng);

// Monte Carlo estimate of E_C || D_C - D_P^{tensor n} ||_tr at M = ceil(e^{nR}).
struct ResolvabilityResult {
    std::size_t n = 0;
    std::size_t m_size = 0;
    std::size_t trials = 0;
    double rate = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> distances;
    std::vector<std::uint64_t> trial_seeds;
    std::optional<ExponentReport> exponent; // absent when R <= I(P,D) + 4 eps
};

ResolvabilityResult estimate_expected_distance(const CqChannel& d, const InputDistribution& p,
                                               std::size_t n, double rate, std::size_t trials,
                                               std::uint64_t master_seed, unsigned threads = 1,
                                               std::optional<double> epsilon_override = {},
                                               std::size_t max_codebook_cells = 1u << 24);

// Bounded-differences tail check at fixed M, plus single-codeword swap
// stability (each swap changes the distance by at most 2/M).
struct ConcentrationReport {
    std::size_t n = 0;
    std::size_t m_size = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    struct TailRow {
        double threshold = 0.0;
        double frequency = 0.0;
        double bound = 0.0; // exp(-t^2 M / 2)
        double std_error = 0.0;
        bool pass = false;
    };
    std::vector<TailRow> tails;
    std::size_t swap_count = 0;
    double swap_max_change = 0.0;
    double swap_bound = 0.0; // 2/M
    bool swap_pass = false;
    bool pass = false;
};

ConcentrationReport concentration_experiment(const CqChannel& d, const InputDistribution& p,
                                             std::size_t n, std::size_t m_size,
                                             std::size_t trials,
                                             const std::vector<double>& thresholds,
                                             std::uint64_t master_seed, unsigned threads = 1,
                                             std::size_t swap_count = 100);

// Exact mean of D_C over all |X|^{nM} codebooks, weighted by P; equals
// D_P^{tensor n}. Enumeration oracle for the unbiasedness property.
ComplexMatrix exhaustive_codebook_mean(const CqChannel& d, const InputDistribution& p,
                                       std::size_t n, std::size_t m_size,
                                       std::size_t budget = 1u << 20);

} // namespace ccq
