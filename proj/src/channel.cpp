#include "ccq/channel.hpp"

#include <cmath>
#include <string>

namespace ccq {

namespace {

void require_pmf(const std::vector<double>& p, double tol, const std::string& what) {
    double sum = 0.0;
    for (const double v : p) {
        if (!(v >= 0.0)) throw ConfigInvalid(what + ": negative or NaN probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
        throw ConfigInvalid(what + ": probabilities sum to " + std::to_string(sum));
}

std::size_t inverse_cdf(const double* p, std::size_t size, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < size; ++i) {
        cum += p[i];
        if (u < cum) return i;
    }
    return size - 1;
}

} // namespace

InputDistribution::InputDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
    if (p_.empty()) throw ConfigInvalid("input distribution must be non-empty");
    require_pmf(p_, 1e-12, "input distribution");
}

InputDistribution InputDistribution::uniform(std::size_t size) {
    if (size == 0) throw ConfigInvalid("uniform distribution needs size >= 1");
    return InputDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

ClassicalChannel::ClassicalChannel(std::size_t input_size, std::size_t output_size,
                                   std::vector<double> kernel)
    : input_size_(input_size), output_size_(output_size), kernel_(std::move(kernel)) {
    if (input_size_ == 0 || output_size_ == 0)
        throw ConfigInvalid("classical channel alphabets must be non-empty");
    if (kernel_.size() != input_size_ * output_size_)
        throw ConfigInvalid("classical channel kernel has wrong entry count");
    for (std::size_t x = 0; x < input_size_; ++x) {
        std::vector<double> row(kernel_.begin() + x * output_size_,
                                kernel_.begin() + (x + 1) * output_size_);
        require_pmf(row, 1e-12, "classical channel row " + std::to_string(x));
    }
}

ClassicalChannel ClassicalChannel::bsc(double flip_probability) {
    if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
        throw ConfigInvalid("BSC flip probability must lie in [0,1]");
    const double p = flip_probability;
    return ClassicalChannel(2, 2, {1.0 - p, p, p, 1.0 - p});
}

ClassicalChannel ClassicalChannel::identity(std::size_t size) {
    std::vector<double> kernel(size * size, 0.0);
    for (std::size_t x = 0; x < size; ++x) kernel[x * size + x] = 1.0;
    return ClassicalChannel(size, size, std::move(kernel));
}

std::vector<double> ClassicalChannel::output_marginal(const InputDistribution& p) const {
    if (p.size() != input_size_)
        throw SizeMismatch("distribution size does not match channel input alphabet");
    std::vector<double> out(output_size_, 0.0);
    for (std::size_t x = 0; x < input_size_; ++x)
        for (std::size_t y = 0; y < output_size_; ++y) out[y] += p[x] * prob(x, y);
    return out;
}

std::size_t ClassicalChannel::transmit(std::size_t x, RngStream& rng) const {
    return inverse_cdf(kernel_.data() + x * output_size_, output_size_, rng.next_double());
}

CqChannel::CqChannel(std::vector<DensityOperator> states) : states_(std::move(states)) {
    if (states_.empty()) throw ConfigInvalid("cq channel needs at least one state");
    const std::size_t d = states_.front().dim();
    for (const auto& s : states_) {
        if (s.dim() != d) throw SizeMismatch("cq channel states must share one dimension");
    }
}

DensityOperator average_output(const CqChannel& d, const InputDistribution& p) {
    if (p.size() != d.input_size())
        throw SizeMismatch("distribution size does not match cq channel input alphabet");
    ComplexMatrix acc(d.dim(), d.dim());
    for (std::size_t x = 0; x < d.input_size(); ++x) acc.add_scaled(d.state(x).matrix(), p[x]);
    return DensityOperator::trusted(std::move(acc));
}

DensityOperator d_nfold(const CqChannel& d, const Word& xn) {
    if (xn.empty()) throw LengthMismatch("d_nfold requires n >= 1");
    std::size_t out_dim = 1;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        if (xn[i] >= d.input_size()) throw ConfigInvalid("word symbol out of alphabet range");
        if (out_dim > max_dim() / d.dim())
            throw DimensionOverflow("d_nfold: dim " + std::to_string(d.dim()) + " with n = " +
                                    std::to_string(xn.size()) + " exceeds max_dim " +
                                    std::to_string(max_dim()));
        out_dim *= d.dim();
    }
    ComplexMatrix acc = d.state(xn[0]).matrix();
    for (std::size_t i = 1; i < xn.size(); ++i) acc = tensor(acc, d.state(xn[i]).matrix());
    return DensityOperator::trusted(std::move(acc));
}

double w_nfold_prob(const ClassicalChannel& w, const Word& xn, const Word& xhatn) {
    if (xn.size() != xhatn.size())
        throw LengthMismatch("w_nfold_prob: word lengths differ");
    double prod = 1.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        if (xn[i] >= w.input_size() || xhatn[i] >= w.output_size())
            throw ConfigInvalid("word symbol out of alphabet range");
        prod *= w.prob(xn[i], xhatn[i]);
    }
    return prod;
}

namespace {

// Decompose one state, sorted non-increasing with tiny negatives clipped.
void kernel_row(const DensityOperator& rho, std::vector<double>& eigs, ComplexMatrix& basis) {
    auto dec = spectral_decompose(rho.matrix());
    for (double& v : dec.eigenvalues) {
        if (v < 0.0) {
            if (v < -1e-10)
                throw NotPsdError("state eigenvalue " + std::to_string(v) + " below -1e-10");
            v = 0.0;
        }
    }
    eigs = std::move(dec.eigenvalues);
    basis = std::move(dec.eigenvectors);
}

} // namespace

SpectralKernel spectral_kernel(const CqChannel& d, const InputDistribution& p) {
    SpectralKernel k;
    k.input_size = d.input_size();
    k.dim = d.dim();
    k.eigenvalue_table.resize(k.input_size);
    k.basis_table.resize(k.input_size);
    for (std::size_t x = 0; x < k.input_size; ++x)
        kernel_row(d.state(x), k.eigenvalue_table[x], k.basis_table[x]);
    const DensityOperator dp = average_output(d, p);
    kernel_row(dp, k.output_spectrum, k.output_basis);
    return k;
}

Word sample_word(const InputDistribution& p, std::size_t n, RngStream& rng) {
    if (n == 0) throw LengthMismatch("sample_word requires n >= 1");
    Word w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = inverse_cdf(p.probabilities().data(), p.size(), rng.next_double());
    return w;
}

namespace {

DensityOperator basis_state(std::size_t dim, std::size_t k) {
    ComplexMatrix m(dim, dim);
    m(k, k) = 1.0;
    return DensityOperator::make(std::move(m));
}

DensityOperator plus_state() {
    ComplexMatrix m(2, 2);
    m(0, 0) = m(0, 1) = m(1, 0) = m(1, 1) = 0.5;
    return DensityOperator::make(std::move(m));
}

DensityOperator diag_state(double a, double b) {
    ComplexMatrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return DensityOperator::make(std::move(m));
}

} // namespace

CqChannel preset_cq(const std::string& name, double q) {
    if (name == "orthogonal") return CqChannel({basis_state(2, 0), basis_state(2, 1)});
    if (name == "bb84-pair") return CqChannel({basis_state(2, 0), plus_state()});
    if (name == "depolarized-pair") {
        if (!(q >= 0.0 && q <= 1.0))
            throw ConfigInvalid("depolarized-pair parameter q must lie in [0,1]");
        return CqChannel({diag_state(1.0 - q / 2.0, q / 2.0), diag_state(q / 2.0, 1.0 - q / 2.0)});
    }
    if (name == "constant") return CqChannel({diag_state(0.5, 0.5), diag_state(0.5, 0.5)});
    throw ConfigInvalid("unknown cq preset '" + name + "'");
}

ClassicalChannel preset_classical(const std::string& name, double param) {
    if (name == "bsc") return ClassicalChannel::bsc(param);
    if (name == "identity") {
        const std::size_t k = param <= 0.0 ? 2 : static_cast<std::size_t>(param);
        return ClassicalChannel::identity(k);
    }
    throw ConfigInvalid("unknown classical preset '" + name + "'");
}

} // namespace ccq
