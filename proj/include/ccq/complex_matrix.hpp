#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "ccq/errors.hpp"
#include "ccq/rng.hpp"

namespace ccq {

using Complex = std::complex<double>;

// Configured cap on composite Hilbert-space dimension. Defaults to 4096,
// overridable with the environment variable CCQ_MAX_DIM or set_max_dim().
std::size_t max_dim();
void set_max_dim(std::size_t value);

// Dense row-major complex matrix. Values are immutable in spirit: operations
// return new matrices; in-place mutation is limited to construction helpers.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Complex* row(std::size_t i) { return data_.data() + i * cols_; }
    const Complex* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* raw() { return reinterpret_cast<double*>(data_.data()); }
    const double* raw() const { return reinterpret_cast<const double*>(data_.data()); }
    std::size_t size() const { return data_.size(); }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scalar);

    // this += w * other (kernel-backed accumulation)
    void add_scaled(const ComplexMatrix& other, double w);
    void add_scaled(const ComplexMatrix& other, Complex a);

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    double max_abs_diff(const ComplexMatrix& other) const;
    bool is_hermitian(double tol) const;
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scalar, ComplexMatrix a);
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product with index convention (i1 i2, j1 j2) -> A[i1,j1] * B[i2,j2].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n);

// Eigensystem of a Hermitian matrix. Eigenvalues sorted non-increasing;
// column j of eigenvectors pairs with eigenvalue j. Within a degenerate
// eigenspace the basis is solver-determined and not contractual.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    ComplexMatrix reconstruct() const;
};

// Cyclic Jacobi with fixed sweep order; deterministic for identical input
// bits. Convergence: off-diagonal Frobenius mass <= 1e-13 * ||A||_F.
SpectralDecomposition spectral_decompose(const ComplexMatrix& a);

// Sum of singular values. Hermitian inputs go through their eigenvalues,
// general square inputs through the spectrum of A^dagger A.
double trace_norm(const ComplexMatrix& a);

// Largest singular value.
double operator_norm(const ComplexMatrix& a);

// Spectral calculus Sum f(lambda_j) |e_j><e_j| for PSD Hermitian input.
// Eigenvalues in [-1e-8, 0) are clipped to 0 before applying f; anything
// more negative throws NotPsdError. Convention: f is never called at
// negative arguments.
ComplexMatrix matrix_function(const ComplexMatrix& a, const std::function<double(double)>& f);
ComplexMatrix matrix_sqrt(const ComplexMatrix& a);

// Positive semidefinite unit-trace operator.
class DensityOperator {
public:
    // Validates Hermiticity (1e-12), trace (1e-10) and spectrum (>= -1e-10).
    static DensityOperator make(ComplexMatrix m);

    // Skips validation; for values that are density operators by
    // construction (mixtures and tensor products of validated states).
    static DensityOperator trusted(ComplexMatrix m);

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

    void validate() const;

private:
    explicit DensityOperator(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

// Empirical check of E sqrt(A) <= sqrt(E A) over a PSD sampler.
struct JensenReport {
    std::size_t trials = 0;
    std::size_t dim = 0;
    double max_gap_eigenvalue = 0.0;
    bool pass = false;
};

JensenReport operator_jensen_sqrt_check(const std::function<ComplexMatrix(RngStream&)>& sampler,
                                        std::size_t trials, RngStream& rng);

} // namespace ccq
