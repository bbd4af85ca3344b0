#pragma once

#include <cstddef>

// Scalar element operations shared by the reference lane and the SIMD tail
// loops. Keeping them in one place guarantees the lanes agree bit for bit on
// every element they both touch.

namespace ccq::kernels::detail {

inline void caxpy_elem(double ar, double ai, const double* x, double* y) {
    const double xr = x[0], xi = x[1];
    y[0] += ar * xr - ai * xi;
    y[1] += ar * xi + ai * xr;
}

inline void caxpy_conj_elem(double ar, double ai, const double* x, double* y) {
    const double xr = x[0], xi = x[1];
    y[0] += ar * xr + ai * xi;
    y[1] += ai * xr - ar * xi;
}

inline void cscale_store_elem(double ar, double ai, const double* x, double* y) {
    const double xr = x[0], xi = x[1];
    y[0] = ar * xr - ai * xi;
    y[1] = ar * xi + ai * xr;
}

inline void pair_rotate_elem(double ar, double ai, double br, double bi, double gr,
                             double gi, double dr, double di, double* x, double* y) {
    const double xr = x[0], xi = x[1];
    const double yr = y[0], yi = y[1];
    x[0] = (ar * xr - ai * xi) + (br * yr - bi * yi);
    x[1] = (ar * xi + ai * xr) + (br * yi + bi * yr);
    y[0] = (gr * xr - gi * xi) + (dr * yr - di * yi);
    y[1] = (gr * xi + gi * xr) + (dr * yi + di * yr);
}

} // namespace ccq::kernels::detail
