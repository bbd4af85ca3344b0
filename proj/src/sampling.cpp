#include "ccq/sampling.hpp"

#include <cmath>

namespace ccq {

ComplexMatrix random_complex_gaussian(std::size_t rows, std::size_t cols, RngStream& rng) {
    ComplexMatrix g(rows, cols);
    const double scale = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            g(i, j) = Complex(scale * rng.next_gaussian(), scale * rng.next_gaussian());
    return g;
}

DensityOperator random_density(std::size_t dim, RngStream& rng) {
    const ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
    ComplexMatrix rho = multiply(g, g.adjoint());
    const double tr = rho.trace().real();
    rho *= Complex(1.0 / tr, 0.0);
    // Exact Hermitian symmetrization so the validation tolerance is met.
    ComplexMatrix sym(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) sym(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
    return DensityOperator::make(std::move(sym));
}

DensityOperator random_pure_density(std::size_t dim, RngStream& rng) {
    std::vector<Complex> v(dim);
    double norm2 = 0.0;
    for (auto& z : v) {
        z = Complex(rng.next_gaussian(), rng.next_gaussian());
        norm2 += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    ComplexMatrix rho(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) rho(i, j) = (inv * v[i]) * std::conj(inv * v[j]);
    ComplexMatrix sym(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) sym(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
    return DensityOperator::make(std::move(sym));
}

ComplexMatrix random_unitary(std::size_t dim, RngStream& rng) {
    ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
    // Modified Gram-Schmidt on columns.
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            Complex proj = 0.0;
            for (std::size_t i = 0; i < dim; ++i) proj += std::conj(g(i, k)) * g(i, j);
            for (std::size_t i = 0; i < dim; ++i) g(i, j) -= proj * g(i, k);
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) norm2 += std::norm(g(i, j));
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < dim; ++i) g(i, j) *= inv;
    }
    return g;
}

ComplexMatrix random_psd(std::size_t dim, RngStream& rng) {
    const ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
    ComplexMatrix p = multiply(g, g.adjoint());
    p *= Complex(1.0 / static_cast<double>(dim), 0.0);
    return p;
}

} // namespace ccq
