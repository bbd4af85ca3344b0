#pragma once

#include "ccq/complex_matrix.hpp"
#include "ccq/rng.hpp"

namespace ccq {

// Entries i.i.d. standard complex Gaussian (variance 1 per complex entry).
ComplexMatrix random_complex_gaussian(std::size_t rows, std::size_t cols, RngStream& rng);

// G G^dagger / tr(G G^dagger): full-rank density operator almost surely.
DensityOperator random_density(std::size_t dim, RngStream& rng);

// Rank-one projector onto a random unit vector.
DensityOperator random_pure_density(std::size_t dim, RngStream& rng);

// Haar-ish unitary via Gram-Schmidt on a Ginibre matrix (deterministic in
// the stream; distribution quality is irrelevant for the checks using it).
ComplexMatrix random_unitary(std::size_t dim, RngStream& rng);

// G G^dagger / dim: PSD with O(1) spectrum.
ComplexMatrix random_psd(std::size_t dim, RngStream& rng);

} // namespace ccq
