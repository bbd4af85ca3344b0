#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccq/info.hpp"
#include "ccq/sampling.hpp"

using namespace ccq;

namespace {

RngStream test_stream(std::uint64_t salt) {
    return RngStream::derive(991, salt, stream_tag::from_name("info-test"));
}

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

CqChannel constant_channel(const ComplexMatrix& rho, std::size_t inputs) {
    std::vector<DensityOperator> states;
    for (std::size_t x = 0; x < inputs; ++x) states.push_back(DensityOperator::make(rho));
    return CqChannel(std::move(states));
}

CqChannel random_channel(std::size_t inputs, std::size_t dim, RngStream& rng) {
    std::vector<DensityOperator> states;
    for (std::size_t x = 0; x < inputs; ++x) states.push_back(random_density(dim, rng));
    return CqChannel(std::move(states));
}

double binary_entropy_nats(double p) {
    const auto term = [](double v) { return v > 0.0 ? -v * std::log(v) : 0.0; };
    return term(p) + term(1.0 - p);
}

// n-fold extension as an explicit channel over X^n; used to check additivity.
CqChannel nfold_channel(const CqChannel& d, std::size_t n) {
    std::vector<DensityOperator> states;
    std::vector<std::size_t> word(n, 0);
    for (;;) {
        states.push_back(d_nfold(d, word));
        std::size_t i = n;
        for (; i-- > 0;) {
            if (++word[i] < d.input_size()) break;
            word[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    return CqChannel(std::move(states));
}

InputDistribution nfold_distribution(const InputDistribution& p, std::size_t n) {
    std::vector<double> probs;
    std::vector<std::size_t> word(n, 0);
    for (;;) {
        double prob = 1.0;
        for (const std::size_t x : word) prob *= p[x];
        probs.push_back(prob);
        std::size_t i = n;
        for (; i-- > 0;) {
            if (++word[i] < p.size()) break;
            word[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    return InputDistribution(std::move(probs));
}

} // namespace

TEST_CASE("information_density") {
    const InputDistribution unif = InputDistribution::uniform(2);
    const ClassicalChannel ident = ClassicalChannel::identity(2);
    CHECK(information_density(unif, ident, {0, 1, 0}, {0, 1, 0}) ==
          doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(information_density(unif, ident, {0, 1}, {0, 0}) ==
          -std::numeric_limits<double>::infinity());

    // input-independent channel: density 0 for every pair
    const ClassicalChannel flat(2, 2, {0.25, 0.75, 0.25, 0.75});
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            CHECK(information_density(unif, flat, {x}, {y}) == doctest::Approx(0.0));

    const ClassicalChannel bsc = ClassicalChannel::bsc(0.1);
    CHECK(information_density(unif, bsc, {0}, {0}) ==
          doctest::Approx(std::log(0.9 / 0.5)).epsilon(1e-12));

    const InputDistribution point({1.0, 0.0});
    const ClassicalChannel copy = ClassicalChannel::identity(2);
    CHECK_THROWS_AS(information_density(point, copy, {0}, {1}), UnreachableOutput);
    CHECK_THROWS_AS(information_density(unif, ident, {0, 1}, {0}), LengthMismatch);
}

TEST_CASE("mutual_information_classical") {
    const InputDistribution unif = InputDistribution::uniform(2);
    const ClassicalChannel flat(2, 2, {0.3, 0.7, 0.3, 0.7});
    CHECK(mutual_information_classical(unif, flat) == doctest::Approx(0.0).epsilon(1e-15));

    const ClassicalChannel ident4 = ClassicalChannel::identity(4);
    CHECK(mutual_information_classical(InputDistribution::uniform(4), ident4) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const ClassicalChannel bsc = ClassicalChannel::bsc(0.1);
    const double expected = std::log(2.0) - binary_entropy_nats(0.1);
    CHECK(mutual_information_classical(unif, bsc) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.3680642).epsilon(1e-6));
}

TEST_CASE("entropies H_P and H_U") {
    const InputDistribution unif = InputDistribution::uniform(2);
    CHECK(entropy_hp(preset_cq("bb84-pair"), unif) == doctest::Approx(0.0).epsilon(1e-12));

    const CqChannel half = constant_channel(diag2(0.5, 0.5), 2);
    CHECK(entropy_hp(half, unif) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(entropy_hu(half, unif) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const CqChannel biased = constant_channel(diag2(0.7, 0.3), 2);
    const double h = binary_entropy_nats(0.7);
    CHECK(h == doctest::Approx(0.610864).epsilon(1e-5));
    CHECK(entropy_hp(biased, unif) == doctest::Approx(h).epsilon(1e-12));
    CHECK(entropy_hu(biased, unif) == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("holevo_information") {
    const InputDistribution unif = InputDistribution::uniform(2);
    const CqChannel constant = constant_channel(diag2(0.6, 0.4), 2);
    CHECK(holevo_information(constant, unif) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(holevo_information(preset_cq("orthogonal"), unif) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // bb84 value from the eigenvalue oracle: H_U of (1 +- 1/sqrt 2)/2, H_P = 0
    const double lp = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    const double oracle = -lp * std::log(lp) - (1.0 - lp) * std::log(1.0 - lp);
    CHECK(holevo_information(preset_cq("bb84-pair"), unif) ==
          doctest::Approx(oracle).epsilon(1e-10));
    CHECK(oracle == doctest::Approx(0.416505).epsilon(1e-4));
}

TEST_CASE("Holevo identity and bounds on random channels") {
    RngStream rng = test_stream(1);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 2 + rng.next_below(3);
        const std::size_t inputs = 2 + rng.next_below(3);
        const CqChannel d = random_channel(inputs, dim, rng);
        const InputDistribution p = InputDistribution::uniform(inputs);
        const double holevo = holevo_information(d, p);
        CHECK(std::abs(holevo - (entropy_hu(d, p) - entropy_hp(d, p))) <= 1e-9);
        CHECK(holevo >= -1e-12);
        CHECK(holevo <= std::log(static_cast<double>(dim)) + 1e-9);
    }
}

TEST_CASE("entropy additivity under i.i.d. extension") {
    RngStream rng = test_stream(2);
    const CqChannel d = random_channel(2, 2, rng);
    const InputDistribution p({0.3, 0.7});
    const double hp1 = entropy_hp(d, p);
    const double hu1 = entropy_hu(d, p);
    for (std::size_t n = 2; n <= 3; ++n) {
        const CqChannel dn = nfold_channel(d, n);
        const InputDistribution pn = nfold_distribution(p, n);
        CHECK(entropy_hp(dn, pn) == doctest::Approx(n * hp1).epsilon(1e-8));
        CHECK(entropy_hu(dn, pn) == doctest::Approx(n * hu1).epsilon(1e-8));
    }
}

TEST_CASE("Renyi entropies: values and errors") {
    const InputDistribution unif = InputDistribution::uniform(2);
    const CqChannel half = constant_channel(diag2(0.5, 0.5), 2);
    for (const double alpha : {0.5, 2.0, 3.0}) {
        CHECK(renyi_conditional(half, unif, alpha) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(renyi_output(half, unif, alpha) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }

    // output Renyi-2 of bb84: -log(l1^2 + l2^2)
    const double lp = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    const double expected = -std::log(lp * lp + (1.0 - lp) * (1.0 - lp));
    CHECK(renyi_output(preset_cq("bb84-pair"), unif, 2.0) ==
          doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(0.287560).epsilon(1e-4));

    CHECK_THROWS_AS(renyi_output(half, unif, 0.0), InvalidAlpha);
    CHECK_THROWS_AS(renyi_conditional(half, unif, -1.0), InvalidAlpha);
}

TEST_CASE("Renyi continuity toward alpha = 1") {
    RngStream rng = test_stream(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t dim = 2 + rng.next_below(3);
        const CqChannel d = random_channel(2, dim, rng);
        const InputDistribution p = InputDistribution::uniform(2);
        const SpectralKernel k = spectral_kernel(d, p);
        const double hp = entropy_hp(k, p);
        const double hu = entropy_hu(k);
        for (const double side : {1.0, -1.0}) {
            double prev_cond = std::numeric_limits<double>::infinity();
            double prev_out = std::numeric_limits<double>::infinity();
            for (const double delta : {1e-2, 1e-3, 1e-4}) {
                const double alpha = 1.0 + side * delta;
                const double dc = std::abs(renyi_conditional(k, p, alpha) - hp);
                const double du = std::abs(renyi_output(k, alpha) - hu);
                CHECK(dc <= prev_cond + 1e-12);
                CHECK(du <= prev_out + 1e-12);
                prev_cond = dc;
                prev_out = du;
            }
            CHECK(prev_cond <= 1e-3);
            CHECK(prev_out <= 1e-3);
        }
    }
}

TEST_CASE("output Renyi monotone non-increasing in alpha") {
    RngStream rng = test_stream(4);
    for (int trial = 0; trial < 10; ++trial) {
        const CqChannel d = random_channel(3, 3, rng);
        const InputDistribution p = InputDistribution::uniform(3);
        const SpectralKernel k = spectral_kernel(d, p);
        double prev = std::numeric_limits<double>::infinity();
        for (const double alpha : {0.25, 0.5, 0.75, 1.25, 1.5, 2.0, 3.0}) {
            const double value = renyi_output(k, alpha);
            CHECK(value <= prev + 1e-10);
            prev = value;
        }
    }
}

TEST_CASE("info_report") {
    const InputDistribution unif = InputDistribution::uniform(2);
    const ClassicalChannel bsc = ClassicalChannel::bsc(0.1);
    const InfoReport report = info_report(preset_cq("bb84-pair"), unif, &bsc);
    CHECK(std::abs(report.i_pd - (report.h_u - report.h_p)) <= 1e-9);
    CHECK(report.i_pw == doctest::Approx(std::log(2.0) - binary_entropy_nats(0.1)).epsilon(1e-12));
    CHECK(report.renyi_grid.size() == default_alpha_grid().size());
    CHECK(report.i_pw >= 0.0);
    CHECK(report.h_p >= 0.0);
    CHECK(report.h_u >= 0.0);
}
