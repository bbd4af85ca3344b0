#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include <algorithm>
#include <functional>

#include "ccq/complex_matrix.hpp"
#include "ccq/kernels.hpp"
#include "ccq/sampling.hpp"

using namespace ccq;

namespace {

ComplexMatrix ket0_proj() {
    ComplexMatrix m(2, 2);
    m(0, 0) = 1.0;
    return m;
}

ComplexMatrix plus_proj() {
    ComplexMatrix m(2, 2);
    m(0, 0) = m(0, 1) = m(1, 0) = m(1, 1) = 0.5;
    return m;
}

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Independent 2x2 Hermitian eigenvalue oracle via the characteristic
// polynomial; used to freeze expected spectra.
std::pair<double, double> eig2_oracle(const ComplexMatrix& m) {
    const double tr = m.trace().real();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

RngStream test_stream(std::uint64_t salt) {
    return RngStream::derive(20240601, salt, stream_tag::from_name("operator-core-test"));
}

} // namespace

TEST_CASE("trace norm: frozen values") {
    RngStream rng = test_stream(1);
    for (int k = 0; k < 5; ++k) {
        const DensityOperator rho = random_density(3, rng);
        CHECK(trace_norm(rho.matrix()) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(trace_norm(diag2(1.0, -1.0)) == doctest::Approx(2.0).epsilon(1e-12));

    // |0><0| - |+><+|: closed form 2 sqrt(1 - |<0|+>|^2) = sqrt(2),
    // cross-checked against the characteristic-polynomial oracle.
    const ComplexMatrix diff = ket0_proj() - plus_proj();
    const auto [l1, l2] = eig2_oracle(diff);
    const double oracle = std::abs(l1) + std::abs(l2);
    CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(trace_norm(diff) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("trace norm of non-Hermitian matrices") {
    // nilpotent shift: singular values (1, 0)
    ComplexMatrix shift(2, 2);
    shift(0, 1) = 1.0;
    CHECK(trace_norm(shift) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(operator_norm(shift) == doctest::Approx(1.0).epsilon(1e-10));

    // planted singular values via A = U diag(s) V^dagger
    RngStream rng = test_stream(13);
    const std::size_t dim = 4;
    const ComplexMatrix u = random_unitary(dim, rng);
    const ComplexMatrix v = random_unitary(dim, rng);
    ComplexMatrix s(dim, dim);
    double sum = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double sv = rng.next_double() * 3.0;
        s(k, k) = sv;
        sum += sv;
    }
    const ComplexMatrix a = multiply(multiply(u, s), v.adjoint());
    CHECK(trace_norm(a) == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("trace norm errors") {
    CHECK_THROWS_AS(trace_norm(ComplexMatrix(2, 3)), NonSquareError);
    ComplexMatrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(trace_norm(bad), NumericalFailure);
}

TEST_CASE("spectral_decompose: frozen values") {
    {
        const auto dec = spectral_decompose(diag2(0.5, 0.5));
        CHECK(dec.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(dec.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const auto dec = spectral_decompose(plus_proj());
        CHECK(dec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dec.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
        // top eigenvector proportional to (1,1)/sqrt(2): check overlap, not phase
        const Complex v0 = dec.eigenvectors(0, 0), v1 = dec.eigenvectors(1, 0);
        const double overlap = std::norm((v0 + v1) / std::sqrt(2.0));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        const ComplexMatrix mix = Complex(0.5, 0.0) * (ket0_proj() + plus_proj());
        const auto [l1, l2] = eig2_oracle(mix);
        CHECK(l1 == doctest::Approx((1.0 + 1.0 / std::sqrt(2.0)) / 2.0).epsilon(1e-12));
        const auto dec = spectral_decompose(mix);
        CHECK(dec.eigenvalues[0] == doctest::Approx(l1).epsilon(1e-10));
        CHECK(dec.eigenvalues[1] == doctest::Approx(l2).epsilon(1e-10));
    }
}

TEST_CASE("spectral_decompose invariants on random Hermitian matrices") {
    RngStream rng = test_stream(2);
    for (int k = 0; k < 10; ++k) {
        const std::size_t dim = 2 + rng.next_below(5);
        ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
        ComplexMatrix h(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));

        const auto dec = spectral_decompose(h);
        // non-increasing order
        for (std::size_t j = 0; j + 1 < dim; ++j)
            CHECK(dec.eigenvalues[j] >= dec.eigenvalues[j + 1]);
        // reconstruction in max-entry norm
        CHECK(dec.reconstruct().max_abs_diff(h) <= 1e-9);
        // orthonormal columns
        const ComplexMatrix gram = multiply(dec.eigenvectors.adjoint(), dec.eigenvectors);
        CHECK(gram.max_abs_diff(ComplexMatrix::identity(dim)) <= 1e-10);
        // deterministic: identical input bits give identical output bits
        const auto dec2 = spectral_decompose(h);
        CHECK(dec.eigenvectors.max_abs_diff(dec2.eigenvectors) == 0.0);
        // re-decomposing the reconstruction moves eigenvalues by <= 1e-9
        const auto dec3 = spectral_decompose(dec.reconstruct());
        for (std::size_t j = 0; j < dim; ++j)
            CHECK(std::abs(dec3.eigenvalues[j] - dec.eigenvalues[j]) <= 1e-9);
    }
}

TEST_CASE("spectral_decompose recovers a planted spectrum at dim 32") {
    RngStream rng = test_stream(11);
    const std::size_t dim = 32;
    const ComplexMatrix u = random_unitary(dim, rng);
    std::vector<double> planted(dim);
    for (std::size_t k = 0; k < dim; ++k) planted[k] = -2.0 + 4.0 * rng.next_double();
    // include a degenerate cluster
    planted[3] = planted[4] = planted[5];
    ComplexMatrix d(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) d(k, k) = planted[k];
    ComplexMatrix h = multiply(multiply(u, d), u.adjoint());
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) h(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

    const auto dec = spectral_decompose(h);
    std::sort(planted.begin(), planted.end(), std::greater<double>());
    for (std::size_t k = 0; k < dim; ++k)
        CHECK(dec.eigenvalues[k] == doctest::Approx(planted[k]).epsilon(1e-9));
    CHECK(dec.reconstruct().max_abs_diff(h) <= 1e-9);
    // trace norm equals the sum of |planted| through the independent route
    double expect = 0.0;
    for (const double v : planted) expect += std::abs(v);
    CHECK(trace_norm(h) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("spectral_decompose is lane-independent") {
    RngStream rng = test_stream(12);
    ComplexMatrix g = random_complex_gaussian(6, 6, rng);
    ComplexMatrix h(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    kernels::force_lane("scalar");
    const auto scalar_dec = spectral_decompose(h);
    kernels::force_lane("auto");
    const auto auto_dec = spectral_decompose(h);
    CHECK(scalar_dec.eigenvectors.max_abs_diff(auto_dec.eigenvectors) == 0.0);
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(scalar_dec.eigenvalues[k] == auto_dec.eigenvalues[k]);
}

TEST_CASE("spectral_decompose errors") {
    ComplexMatrix nh(2, 2);
    nh(0, 1) = 1.0; // not Hermitian
    CHECK_THROWS_AS(spectral_decompose(nh), NotHermitianError);
    CHECK_THROWS_AS(spectral_decompose(ComplexMatrix(1, 2)), NonSquareError);
}

TEST_CASE("tensor products") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(tensor(i2, i2).max_abs_diff(ComplexMatrix::identity(4)) == 0.0);

    RngStream rng = test_stream(3);
    const DensityOperator rho = random_density(2, rng);
    CHECK(tensor_power(rho.matrix(), 1).max_abs_diff(rho.matrix()) == 0.0);

    for (int k = 0; k < 5; ++k) {
        const DensityOperator a = random_density(2, rng);
        const DensityOperator b = random_density(3, rng);
        const ComplexMatrix prod = tensor(a.matrix(), b.matrix());
        const Complex direct = prod.trace();
        const Complex expected = a.matrix().trace() * b.matrix().trace();
        CHECK(std::abs(direct - expected) <= 1e-12);
    }

    // index convention: (i1 i2, j1 j2) -> A[i1,j1] B[i2,j2]
    ComplexMatrix a(2, 2), b(2, 2);
    a(0, 1) = Complex(2.0, 1.0);
    b(1, 0) = Complex(0.0, 3.0);
    const ComplexMatrix t = tensor(a, b);
    CHECK(t(0 * 2 + 1, 1 * 2 + 0) == a(0, 1) * b(1, 0));

    // tensor_power of a density operator stays a density operator
    const DensityOperator rho2 = random_density(2, rng);
    DensityOperator cube = DensityOperator::trusted(tensor_power(rho2.matrix(), 3));
    CHECK_NOTHROW(cube.validate());

    set_max_dim(8);
    CHECK_THROWS_AS(tensor_power(ComplexMatrix::identity(2), 4), DimensionOverflow);
    set_max_dim(4096);
}

TEST_CASE("matrix_function") {
    RngStream rng = test_stream(4);
    const DensityOperator rho = random_density(3, rng);
    const ComplexMatrix ident = matrix_function(rho.matrix(), [](double x) { return x; });
    CHECK(ident.max_abs_diff(rho.matrix()) <= 1e-9);

    const ComplexMatrix half = diag2(0.5, 0.5);
    const ComplexMatrix squared = matrix_function(half, [](double x) { return x * x; });
    CHECK(squared.max_abs_diff(diag2(0.25, 0.25)) <= 1e-12);

    const ComplexMatrix root = matrix_sqrt(diag2(0.81, 0.04));
    CHECK(root.max_abs_diff(diag2(0.9, 0.2)) <= 1e-12);

    const ComplexMatrix psd = random_psd(4, rng);
    const ComplexMatrix s = matrix_sqrt(psd);
    CHECK(multiply(s, s).max_abs_diff(psd) <= 1e-8);

    CHECK_THROWS_AS(matrix_sqrt(diag2(-1.0, 1.0)), NotPsdError);
}

TEST_CASE("operator Jensen inequality for the square root") {
    RngStream rng = test_stream(5);
    {
        const ComplexMatrix fixed = random_psd(3, rng);
        RngStream inner = test_stream(6);
        const auto report = operator_jensen_sqrt_check(
            [&](RngStream&) { return fixed; }, 50, inner);
        CHECK(std::abs(report.max_gap_eigenvalue) <= 1e-9);
        CHECK(report.pass);
    }
    {
        // two-point sampler {|0><0|, |1><1|}: E sqrt(A) = I/2, sqrt(EA) = I/sqrt(2)
        int toggle = 0;
        RngStream inner = test_stream(7);
        const auto report = operator_jensen_sqrt_check(
            [&](RngStream&) { return toggle++ % 2 == 0 ? diag2(1.0, 0.0) : diag2(0.0, 1.0); },
            100, inner);
        CHECK(report.max_gap_eigenvalue ==
              doctest::Approx(0.5 - 1.0 / std::sqrt(2.0)).epsilon(1e-10));
        CHECK(report.pass);
    }
    {
        RngStream inner = test_stream(8);
        const auto report = operator_jensen_sqrt_check(
            [](RngStream& r) { return random_psd(3, r); }, 1000, inner);
        CHECK(report.max_gap_eigenvalue <= 1e-8);
        CHECK(report.pass);
    }
}

TEST_CASE("norm ordering, ideal property and submultiplicativity") {
    RngStream rng = test_stream(9);
    for (int k = 0; k < 10; ++k) {
        const std::size_t dim = 2 + rng.next_below(3);
        const ComplexMatrix a = random_complex_gaussian(dim, dim, rng);
        const ComplexMatrix b = random_complex_gaussian(dim, dim, rng);
        const ComplexMatrix c = random_complex_gaussian(dim, dim, rng);
        CHECK(operator_norm(a) <= trace_norm(a) + 1e-10);
        const double lhs = trace_norm(multiply(a, b));
        const double rhs = trace_norm(a) * trace_norm(b);
        CHECK(lhs <= rhs * (1.0 + 1e-9));
        // two-sided ideal bound of the trace class
        const double triple = trace_norm(multiply(multiply(a, b), c));
        const double ideal = operator_norm(a) * trace_norm(b) * operator_norm(c);
        CHECK(triple <= ideal * (1.0 + 1e-9));
    }
}

TEST_CASE("trace norm duality") {
    RngStream rng = test_stream(10);
    const std::size_t dim = 3;
    ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
    ComplexMatrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) a(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    const double tn = trace_norm(a);

    double best = 0.0;
    for (int k = 0; k < 200; ++k) {
        const ComplexMatrix u = random_unitary(dim, rng);
        const double v = std::abs(multiply(a, u).trace());
        CHECK(v <= tn + 1e-9);
        best = std::max(best, v);
    }
    // arbitrary contractions stay below the norm too
    for (int k = 0; k < 50; ++k) {
        ComplexMatrix g = random_complex_gaussian(dim, dim, rng);
        g *= Complex(1.0 / operator_norm(g), 0.0);
        CHECK(std::abs(multiply(a, g).trace()) <= tn + 1e-9);
    }
    // eigenbasis witness: B = sum sign(lambda) |v><v| is unitary and attains the norm
    auto dec = spectral_decompose(a);
    for (double& lambda : dec.eigenvalues) lambda = lambda >= 0.0 ? 1.0 : -1.0;
    const ComplexMatrix witness = dec.reconstruct();
    CHECK(operator_norm(witness) <= 1.0 + 1e-9);
    const double attained = std::abs(multiply(a, witness).trace());
    CHECK(attained == doctest::Approx(tn).epsilon(1e-9));
    best = std::max(best, attained);
    CHECK(best == doctest::Approx(tn).epsilon(1e-9));
}

TEST_CASE("density operator validation") {
    CHECK_THROWS_AS(DensityOperator::make(diag2(0.6, 0.6)), NotPsdError); // trace 1.2
    CHECK_THROWS_AS(DensityOperator::make(diag2(1.5, -0.5)), NotPsdError);
    ComplexMatrix nh(2, 2);
    nh(0, 0) = 0.5;
    nh(1, 1) = 0.5;
    nh(0, 1) = Complex(0.0, 1e-6);
    CHECK_THROWS_AS(DensityOperator::make(nh), NotHermitianError);
    CHECK_NOTHROW(DensityOperator::make(diag2(0.3, 0.7)));
}
