#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccq/complex_matrix.hpp"
#include "ccq/rng.hpp"

namespace ccq {

// Word over a contiguous integer alphabet {0, ..., k-1}.
using Word = std::vector<std::size_t>;

class InputDistribution {
public:
    explicit InputDistribution(std::vector<double> probabilities);
    static InputDistribution uniform(std::size_t size);

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t x) const { return p_[x]; }
    const std::vector<double>& probabilities() const { return p_; }

private:
    std::vector<double> p_;
};

// Row-stochastic kernel W(xhat | x) on finite alphabets.
class ClassicalChannel {
public:
    ClassicalChannel(std::size_t input_size, std::size_t output_size, std::vector<double> kernel);
    static ClassicalChannel bsc(double flip_probability);
    static ClassicalChannel identity(std::size_t size);

    std::size_t input_size() const { return input_size_; }
    std::size_t output_size() const { return output_size_; }
    double prob(std::size_t x, std::size_t xhat) const { return kernel_[x * output_size_ + xhat]; }
    const std::vector<double>& kernel() const { return kernel_; }

    // Exact output marginal of P through W.
    std::vector<double> output_marginal(const InputDistribution& p) const;

    // One channel use: sample xhat ~ W(.|x) by inverse CDF.
    std::size_t transmit(std::size_t x, RngStream& rng) const;

private:
    std::size_t input_size_;
    std::size_t output_size_;
    std::vector<double> kernel_;
};

// Finite-input channel with density-operator outputs.
class CqChannel {
public:
    explicit CqChannel(std::vector<DensityOperator> states);

    std::size_t input_size() const { return states_.size(); }
    std::size_t dim() const { return states_.front().dim(); }
    const DensityOperator& state(std::size_t x) const { return states_[x]; }

private:
    std::vector<DensityOperator> states_;
};

// Eigenvalue kernel P(y|x), eigenbases e_{y|x}, and the spectrum U(y) /
// basis e_y of the average output. Eigenvalue rows are sorted non-increasing
// per input; y is an opaque index. Zero eigenvalues are retained so y ranges
// over {0, ..., dim-1}; negative rounding noise in [-1e-10, 0) is clipped.
struct SpectralKernel {
    std::size_t input_size = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> eigenvalue_table; // [x][y] = P(y|x)
    std::vector<ComplexMatrix> basis_table;            // column y of entry x = e_{y|x}
    std::vector<double> output_spectrum;               // U(y)
    ComplexMatrix output_basis;                        // column y = e_y
};

DensityOperator average_output(const CqChannel& d, const InputDistribution& p);
DensityOperator d_nfold(const CqChannel& d, const Word& xn);
double w_nfold_prob(const ClassicalChannel& w, const Word& xn, const Word& xhatn);
SpectralKernel spectral_kernel(const CqChannel& d, const InputDistribution& p);
Word sample_word(const InputDistribution& p, std::size_t n, RngStream& rng);

// Presets. The cq presets are binary-input, dimension 2.
CqChannel preset_cq(const std::string& name, double q = 0.5);
ClassicalChannel preset_classical(const std::string& name, double param = 0.0);

} // namespace ccq
