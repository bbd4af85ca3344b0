#pragma once

#include <vector>

#include "ccq/channel.hpp"

namespace ccq {

// All quantities in nats (natural logarithm throughout).

// log of the Radon-Nikodym density of W^n(.|x^n) against the exact output
// marginal, summed per letter. Returns -infinity when some W(xhat_i|x_i)=0;
// throws UnreachableOutput when the marginal vanishes at a requested output.
double information_density(const InputDistribution& p, const ClassicalChannel& w, const Word& xn,
                           const Word& xhatn);

double mutual_information_classical(const InputDistribution& p, const ClassicalChannel& w);

// Classical entropies of the spectral kernel: H_P = -E_X sum_y P(y|X) log P(y|X)
// and H_U = -sum_y U(y) log U(y), with 0 log 0 = 0.
double entropy_hp(const SpectralKernel& kernel, const InputDistribution& p);
double entropy_hu(const SpectralKernel& kernel);
double entropy_hp(const CqChannel& d, const InputDistribution& p);
double entropy_hu(const CqChannel& d, const InputDistribution& p);

// Renyi entropies: H_alpha = log(E sum_y P(y|X)^alpha)/(1-alpha) and
// H~_alpha = log(sum_y U(y)^alpha)/(1-alpha); at alpha = 1 they continue to
// H_P and H_U. Throws InvalidAlpha for alpha <= 0.
double renyi_conditional(const SpectralKernel& kernel, const InputDistribution& p, double alpha);
double renyi_output(const SpectralKernel& kernel, double alpha);
double renyi_conditional(const CqChannel& d, const InputDistribution& p, double alpha);
double renyi_output(const CqChannel& d, const InputDistribution& p, double alpha);

// Holevo information I(P,D) computed as H_U - H_P, cross-checked against the
// direct form E tr(D(X) log D(X)) - tr(D_P log D_P) through the matrix
// calculus; disagreement beyond 1e-8 raises NumericalFailure.
double holevo_information(const CqChannel& d, const InputDistribution& p);

struct RenyiGridEntry {
    double alpha;
    double conditional; // H_alpha
    double output;      // H~_alpha
};

struct InfoReport {
    double i_pw = 0.0; // I(P,W); NaN when no classical channel was given
    double i_pd = 0.0; // I(P,D)
    double h_p = 0.0;
    double h_u = 0.0;
    double alpha_min = 0.5; // recorded for exponent selection; any value in (0,1) works here
    std::vector<RenyiGridEntry> renyi_grid;
};

const std::vector<double>& default_alpha_grid();

InfoReport info_report(const CqChannel& d, const InputDistribution& p,
                       const ClassicalChannel* w = nullptr,
                       const std::vector<double>& alphas = default_alpha_grid());

} // namespace ccq
