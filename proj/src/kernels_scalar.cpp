#include "ccq/kernels.hpp"

#include "kernels_detail.hpp"

namespace ccq::kernels {

namespace {

void caxpy_scalar(std::size_t len, double ar, double ai, const double* x, double* y) {
    for (std::size_t i = 0; i < len; ++i)
        detail::caxpy_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void caxpy_conj_scalar(std::size_t len, double ar, double ai, const double* x, double* y) {
    for (std::size_t i = 0; i < len; ++i)
        detail::caxpy_conj_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void cscale_store_scalar(std::size_t len, double ar, double ai, const double* x, double* y) {
    for (std::size_t i = 0; i < len; ++i)
        detail::cscale_store_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void raxpy_scalar(std::size_t len, double a, const double* x, double* y) {
    const std::size_t doubles = 2 * len;
    for (std::size_t i = 0; i < doubles; ++i) y[i] += a * x[i];
}

void pair_rotate_scalar(std::size_t len, double ar, double ai, double br, double bi,
                        double gr, double gi, double dr, double di, double* x, double* y) {
    for (std::size_t i = 0; i < len; ++i)
        detail::pair_rotate_elem(ar, ai, br, bi, gr, gi, dr, di, x + 2 * i, y + 2 * i);
}

double sumsq_scalar(std::size_t len, const double* x) {
    double acc = 0.0;
    const std::size_t doubles = 2 * len;
    for (std::size_t i = 0; i < doubles; ++i) acc += x[i] * x[i];
    return acc;
}

} // namespace

const Table& scalar_table() {
    static const Table table{
        "scalar",          caxpy_scalar, caxpy_conj_scalar, cscale_store_scalar,
        raxpy_scalar, pair_rotate_scalar, sumsq_scalar,
    };
    return table;
}

} // namespace ccq::kernels
