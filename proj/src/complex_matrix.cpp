#include "ccq/complex_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "ccq/kernels.hpp"

namespace ccq {

namespace {

std::atomic<std::size_t>& max_dim_slot() {
    static std::atomic<std::size_t> value{[] {
        const char* env = std::getenv("CCQ_MAX_DIM");
        if (env != nullptr && *env != '\0') {
            const long long parsed = std::atoll(env);
            if (parsed > 0) return static_cast<std::size_t>(parsed);
        }
        return std::size_t{4096};
    }()};
    return value;
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw SizeMismatch("matrix shapes differ: " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                           std::to_string(b.cols()));
}

} // namespace

std::size_t max_dim() { return max_dim_slot().load(std::memory_order_relaxed); }

void set_max_dim(std::size_t value) {
    if (value == 0) throw ConfigInvalid("max_dim must be positive");
    max_dim_slot().store(value, std::memory_order_relaxed);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other);
    kernels::active().raxpy(size(), 1.0, other.raw(), raw());
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other);
    kernels::active().raxpy(size(), -1.0, other.raw(), raw());
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
    for (auto& z : data_) z *= scalar;
    return *this;
}

void ComplexMatrix::add_scaled(const ComplexMatrix& other, double w) {
    require_same_shape(*this, other);
    kernels::active().raxpy(size(), w, other.raw(), raw());
}

void ComplexMatrix::add_scaled(const ComplexMatrix& other, Complex a) {
    require_same_shape(*this, other);
    kernels::active().caxpy(size(), a.real(), a.imag(), other.raw(), raw());
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Complex ComplexMatrix::trace() const {
    if (!square()) throw NonSquareError("trace of a non-square matrix");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    return std::sqrt(kernels::active().sumsq(size(), raw()));
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    require_same_shape(*this, other);
    double m = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
    return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i; j < cols_; ++j) {
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
        }
    }
    return true;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
}

ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
}

ComplexMatrix operator*(Complex scalar, ComplexMatrix a) {
    a *= scalar;
    return a;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw SizeMismatch("matrix product shapes: " + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()));
    ComplexMatrix c(a.rows(), b.cols());
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = reinterpret_cast<double*>(c.row(i));
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const Complex alk = a(i, l);
            if (alk.real() == 0.0 && alk.imag() == 0.0) continue;
            k.caxpy(b.cols(), alk.real(), alk.imag(),
                    reinterpret_cast<const double*>(b.row(l)), crow);
        }
    }
    return c;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t out_rows = a.rows() * b.rows();
    const std::size_t out_cols = a.cols() * b.cols();
    if (std::max(out_rows, out_cols) > max_dim())
        throw DimensionOverflow("tensor product dimension " +
                                std::to_string(std::max(out_rows, out_cols)) + " exceeds max_dim " +
                                std::to_string(max_dim()));
    ComplexMatrix out(out_rows, out_cols);
    const auto& k = kernels::active();
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1) {
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
            const Complex w = a(i1, j1);
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2) {
                double* dst = reinterpret_cast<double*>(out.row(i1 * b.rows() + i2) + j1 * b.cols());
                k.cscale_store(b.cols(), w.real(), w.imag(),
                               reinterpret_cast<const double*>(b.row(i2)), dst);
            }
        }
    }
    return out;
}

ComplexMatrix tensor_power(const ComplexMatrix& a, std::size_t n) {
    if (n == 0) throw DimensionOverflow("tensor_power requires n >= 1");
    ComplexMatrix acc = a;
    for (std::size_t i = 1; i < n; ++i) acc = tensor(acc, a);
    return acc;
}

namespace {

// Off-diagonal Frobenius mass of a Hermitian matrix: sqrt(2 sum_{i<j} |a_ij|^2).
double offdiag_mass(const ComplexMatrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) acc += std::norm(a(i, j));
    return std::sqrt(2.0 * acc);
}

constexpr int kMaxSweeps = 64;
constexpr double kHermTol = 1e-12;
constexpr double kConvergenceFactor = 1e-13;

} // namespace

SpectralDecomposition spectral_decompose(const ComplexMatrix& a) {
    if (!a.square()) throw NonSquareError("spectral_decompose requires a square matrix");
    if (!a.all_finite()) throw NumericalFailure("spectral_decompose: non-finite entries");
    if (!a.is_hermitian(kHermTol))
        throw NotHermitianError("spectral_decompose: input is not Hermitian within 1e-12");

    const std::size_t n = a.rows();
    ComplexMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);

    // Scalar accumulation: the sweep count must not depend on the kernel lane.
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm_sq += std::norm(w(i, j));
    const double threshold = kConvergenceFactor * std::sqrt(norm_sq);
    const auto& kern = kernels::active();
    std::vector<Complex> colp(n), colq(n);
    auto* colp_raw = reinterpret_cast<double*>(colp.data());
    auto* colq_raw = reinterpret_cast<double*>(colq.data());

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (offdiag_mass(w) <= threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = w(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double sign = tau >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const Complex phase = apq / r;
                const Complex s = (t * c) * phase;
                const Complex sbar = std::conj(s);

                // rows: row_p <- c*row_p - s*row_q ; row_q <- conj(s)*row_p + c*row_q
                kern.pair_rotate(n, c, 0.0, -s.real(), -s.imag(), sbar.real(), sbar.imag(), c,
                                 0.0, reinterpret_cast<double*>(w.row(p)),
                                 reinterpret_cast<double*>(w.row(q)));
                // cols: col_p <- c*col_p - conj(s)*col_q ; col_q <- s*col_p + c*col_q
                for (std::size_t i = 0; i < n; ++i) {
                    colp[i] = w(i, p);
                    colq[i] = w(i, q);
                }
                kern.pair_rotate(n, c, 0.0, -sbar.real(), -sbar.imag(), s.real(), s.imag(), c,
                                 0.0, colp_raw, colq_raw);
                for (std::size_t i = 0; i < n; ++i) {
                    w(i, p) = colp[i];
                    w(i, q) = colq[i];
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                w(p, p) = Complex(w(p, p).real(), 0.0);
                w(q, q) = Complex(w(q, q).real(), 0.0);

                // eigenvector accumulation: V <- V U (same column update)
                for (std::size_t i = 0; i < n; ++i) {
                    colp[i] = v(i, p);
                    colq[i] = v(i, q);
                }
                kern.pair_rotate(n, c, 0.0, -sbar.real(), -sbar.imag(), s.real(), s.imag(), c,
                                 0.0, colp_raw, colq_raw);
                for (std::size_t i = 0; i < n; ++i) {
                    v(i, p) = colp[i];
                    v(i, q) = colq[i];
                }
            }
        }
    }
    if (!converged && offdiag_mass(w) > threshold)
        throw NumericalFailure("Jacobi eigensolver did not converge in " +
                               std::to_string(kMaxSweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return w(x, x).real() > w(y, y).real();
    });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = w(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    const std::size_t n = eigenvalues.size();
    ComplexMatrix out(n, n);
    const auto& kern = kernels::active();
    std::vector<Complex> vec(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lambda = eigenvalues[j];
        if (lambda == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) vec[i] = eigenvectors(i, j);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex w = lambda * vec[i];
            kern.caxpy_conj(n, w.real(), w.imag(), reinterpret_cast<const double*>(vec.data()),
                            reinterpret_cast<double*>(out.row(i)));
        }
    }
    return out;
}

double trace_norm(const ComplexMatrix& a) {
    if (!a.square()) throw NonSquareError("trace_norm requires a square matrix");
    if (!a.all_finite()) throw NumericalFailure("trace_norm: non-finite entries");
    if (a.is_hermitian(kHermTol)) {
        const auto eig = spectral_decompose(a);
        double s = 0.0;
        for (const double lambda : eig.eigenvalues) s += std::abs(lambda);
        return s;
    }
    const auto eig = spectral_decompose(multiply(a.adjoint(), a));
    double s = 0.0;
    for (const double lambda : eig.eigenvalues) s += std::sqrt(std::max(lambda, 0.0));
    return s;
}

double operator_norm(const ComplexMatrix& a) {
    if (!a.square()) throw NonSquareError("operator_norm requires a square matrix");
    if (a.is_hermitian(kHermTol)) {
        const auto eig = spectral_decompose(a);
        double m = 0.0;
        for (const double lambda : eig.eigenvalues) m = std::max(m, std::abs(lambda));
        return m;
    }
    const auto eig = spectral_decompose(multiply(a.adjoint(), a));
    double m = 0.0;
    for (const double lambda : eig.eigenvalues) m = std::max(m, lambda);
    return std::sqrt(std::max(m, 0.0));
}

namespace {
constexpr double kPsdHardTol = 1e-8;
}

ComplexMatrix matrix_function(const ComplexMatrix& a, const std::function<double(double)>& f) {
    auto eig = spectral_decompose(a);
    if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -kPsdHardTol)
        throw NotPsdError("matrix_function: minimum eigenvalue " +
                          std::to_string(eig.eigenvalues.back()) + " below -1e-8");
    for (double& lambda : eig.eigenvalues) lambda = f(std::max(lambda, 0.0));
    return eig.reconstruct();
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& a) {
    return matrix_function(a, [](double x) { return std::sqrt(x); });
}

DensityOperator DensityOperator::make(ComplexMatrix m) {
    DensityOperator rho(std::move(m));
    rho.validate();
    return rho;
}

DensityOperator DensityOperator::trusted(ComplexMatrix m) { return DensityOperator(std::move(m)); }

void DensityOperator::validate() const {
    if (!m_.square()) throw NonSquareError("density operator must be square");
    if (!m_.all_finite()) throw NumericalFailure("density operator has non-finite entries");
    if (!m_.is_hermitian(1e-12))
        throw NotHermitianError("density operator not Hermitian within 1e-12");
    const Complex t = m_.trace();
    if (std::abs(t - Complex(1.0, 0.0)) > 1e-10)
        throw NotPsdError("density operator trace deviates from 1 by more than 1e-10");
    const auto eig = spectral_decompose(m_);
    if (!eig.eigenvalues.empty() && eig.eigenvalues.back() < -1e-10)
        throw NotPsdError("density operator minimum eigenvalue " +
                          std::to_string(eig.eigenvalues.back()) + " below -1e-10");
}

JensenReport operator_jensen_sqrt_check(const std::function<ComplexMatrix(RngStream&)>& sampler,
                                        std::size_t trials, RngStream& rng) {
    if (trials == 0) throw ConfigInvalid("operator_jensen_sqrt_check requires trials >= 1");
    ComplexMatrix mean_a;
    ComplexMatrix mean_sqrt;
    for (std::size_t t = 0; t < trials; ++t) {
        const ComplexMatrix sample = sampler(rng);
        const ComplexMatrix root = matrix_sqrt(sample);
        if (t == 0) {
            mean_a = sample;
            mean_sqrt = root;
        } else {
            mean_a += sample;
            mean_sqrt += root;
        }
    }
    const double inv = 1.0 / static_cast<double>(trials);
    mean_a *= inv;
    mean_sqrt *= inv;

    const ComplexMatrix gap = mean_sqrt - matrix_sqrt(mean_a);
    const auto eig = spectral_decompose(gap);
    JensenReport report;
    report.trials = trials;
    report.dim = mean_a.rows();
    report.max_gap_eigenvalue = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
    report.pass = report.max_gap_eigenvalue <= 1e-8;
    return report;
}

} // namespace ccq
