#pragma once

#include <cstddef>
#include <string>

namespace ccq::kernels {

// Inner arithmetic kernels over interleaved complex<double> buffers
// (re, im, re, im, ...). `len` counts complex elements. A scalar reference
// lane and an AVX2 lane are provided; the active lane is chosen once at
// startup from CPU capabilities and may be overridden with the environment
// variable CCQ_KERNELS=auto|scalar|avx2 (or force_lane in tests).
//
// The element-wise kernels (caxpy, caxpy_conj, cscale_store, raxpy,
// pair_rotate) are bit-identical across lanes: every lane performs the same
// multiply/add sequence per element. sumsq is a reduction whose accumulation
// order differs per lane and is only equivalent up to rounding.
struct Table {
    const char* name;

    // y[i] += a * x[i]
    void (*caxpy)(std::size_t len, double ar, double ai, const double* x, double* y);
    // y[i] += a * conj(x[i])
    void (*caxpy_conj)(std::size_t len, double ar, double ai, const double* x, double* y);
    // y[i] = a * x[i]
    void (*cscale_store)(std::size_t len, double ar, double ai, const double* x, double* y);
    // y[i] += a * x[i], real a
    void (*raxpy)(std::size_t len, double a, const double* x, double* y);
    // (x[i], y[i]) <- (a*x[i] + b*y[i], g*x[i] + d*y[i])
    void (*pair_rotate)(std::size_t len, double ar, double ai, double br, double bi,
                        double gr, double gi, double dr, double di, double* x, double* y);
    // sum over i of re^2 + im^2
    double (*sumsq)(std::size_t len, const double* x);
};

const Table& scalar_table();

bool avx2_supported();
// Null when the build has no AVX2 lane.
const Table* avx2_table();

// Active lane, resolved once. Thread-safe after first use.
const Table& active();

// Test hook: force a lane by name ("scalar", "avx2", "auto"). Throws
// ccq::ConfigInvalid for unknown or unsupported lanes.
void force_lane(const std::string& name);

} // namespace ccq::kernels
