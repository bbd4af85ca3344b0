#include "ccq/info.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ccq {

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

double pow_zero_safe(double v, double alpha) { return v > 0.0 ? std::pow(v, alpha) : 0.0; }

} // namespace

double information_density(const InputDistribution& p, const ClassicalChannel& w, const Word& xn,
                           const Word& xhatn) {
    if (xn.size() != xhatn.size())
        throw LengthMismatch("information_density: word lengths differ");
    const std::vector<double> marginal = w.output_marginal(p);
    double density = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        const double px = marginal[xhatn[i]];
        if (px <= 0.0)
            throw UnreachableOutput("output symbol " + std::to_string(xhatn[i]) +
                                    " has zero marginal probability");
        const double wx = w.prob(xn[i], xhatn[i]);
        if (wx == 0.0) return -std::numeric_limits<double>::infinity();
        density += std::log(wx / px);
    }
    return density;
}

double mutual_information_classical(const InputDistribution& p, const ClassicalChannel& w) {
    const std::vector<double> marginal = w.output_marginal(p);
    double info = 0.0;
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        for (std::size_t y = 0; y < w.output_size(); ++y) {
            const double joint = p[x] * w.prob(x, y);
            if (joint > 0.0) info += joint * std::log(w.prob(x, y) / marginal[y]);
        }
    }
    return std::max(info, 0.0);
}

double entropy_hp(const SpectralKernel& kernel, const InputDistribution& p) {
    if (p.size() != kernel.input_size)
        throw SizeMismatch("distribution size does not match kernel input alphabet");
    double h = 0.0;
    for (std::size_t x = 0; x < kernel.input_size; ++x) {
        double hx = 0.0;
        for (const double v : kernel.eigenvalue_table[x]) hx -= xlogx(v);
        h += p[x] * hx;
    }
    return std::max(h, 0.0);
}

double entropy_hu(const SpectralKernel& kernel) {
    double h = 0.0;
    for (const double v : kernel.output_spectrum) h -= xlogx(v);
    return std::max(h, 0.0);
}

double entropy_hp(const CqChannel& d, const InputDistribution& p) {
    return entropy_hp(spectral_kernel(d, p), p);
}

double entropy_hu(const CqChannel& d, const InputDistribution& p) {
    return entropy_hu(spectral_kernel(d, p));
}

double renyi_conditional(const SpectralKernel& kernel, const InputDistribution& p, double alpha) {
    if (!(alpha > 0.0)) throw InvalidAlpha("renyi_conditional requires alpha > 0");
    if (alpha == 1.0) return entropy_hp(kernel, p);
    double moment = 0.0;
    for (std::size_t x = 0; x < kernel.input_size; ++x) {
        double mx = 0.0;
        for (const double v : kernel.eigenvalue_table[x]) mx += pow_zero_safe(v, alpha);
        moment += p[x] * mx;
    }
    return std::log(moment) / (1.0 - alpha);
}

double renyi_output(const SpectralKernel& kernel, double alpha) {
    if (!(alpha > 0.0)) throw InvalidAlpha("renyi_output requires alpha > 0");
    if (alpha == 1.0) return entropy_hu(kernel);
    double moment = 0.0;
    for (const double v : kernel.output_spectrum) moment += pow_zero_safe(v, alpha);
    return std::log(moment) / (1.0 - alpha);
}

double renyi_conditional(const CqChannel& d, const InputDistribution& p, double alpha) {
    return renyi_conditional(spectral_kernel(d, p), p, alpha);
}

double renyi_output(const CqChannel& d, const InputDistribution& p, double alpha) {
    return renyi_output(spectral_kernel(d, p), alpha);
}

double holevo_information(const CqChannel& d, const InputDistribution& p) {
    const SpectralKernel kernel = spectral_kernel(d, p);
    const double via_entropies = entropy_hu(kernel) - entropy_hp(kernel, p);

    // Redundant route through the matrix calculus: E tr(D(X) log D(X)) is
    // the trace of the reconstructed x log x spectral function.
    const auto f = [](double v) { return xlogx(v); };
    double direct = 0.0;
    for (std::size_t x = 0; x < d.input_size(); ++x)
        direct += p[x] * matrix_function(d.state(x).matrix(), f).trace().real();
    direct -= matrix_function(average_output(d, p).matrix(), f).trace().real();

    if (std::abs(via_entropies - direct) > 1e-8)
        throw NumericalFailure("holevo_information: entropy route " +
                               std::to_string(via_entropies) + " and direct route " +
                               std::to_string(direct) + " disagree beyond 1e-8");
    return via_entropies;
}

const std::vector<double>& default_alpha_grid() {
    static const std::vector<double> grid{0.5, 0.75, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0};
    return grid;
}

InfoReport info_report(const CqChannel& d, const InputDistribution& p, const ClassicalChannel* w,
                       const std::vector<double>& alphas) {
    InfoReport report;
    const SpectralKernel kernel = spectral_kernel(d, p);
    report.h_p = entropy_hp(kernel, p);
    report.h_u = entropy_hu(kernel);
    report.i_pd = holevo_information(d, p);
    report.i_pw = w != nullptr ? mutual_information_classical(p, *w)
                               : std::numeric_limits<double>::quiet_NaN();
    for (const double alpha : alphas)
        report.renyi_grid.push_back(
            {alpha, renyi_conditional(kernel, p, alpha), renyi_output(kernel, alpha)});
    return report;
}

} // namespace ccq
