#include "ccq/kernels.hpp"

#include "kernels_detail.hpp"

#if defined(CCQ_HAVE_AVX2)

#include <immintrin.h>

namespace ccq::kernels {

namespace {

// One __m256d holds two interleaved complex doubles [re0, im0, re1, im1].

// a * x for broadcast complex a: even lanes ar*xr - ai*xi, odd ar*xi + ai*xr.
inline __m256d cmul2(__m256d are, __m256d aim, __m256d x) {
    const __m256d xswap = _mm256_permute_pd(x, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(are, x), _mm256_mul_pd(aim, xswap));
}

// a * conj(x): even lanes ar*xr + ai*xi, odd ai*xr - ar*xi.
inline __m256d cmul_conj2(__m256d are, __m256d aim, __m256d x) {
    const __m256d xswap = _mm256_permute_pd(x, 0x5);
    const __m256d u = _mm256_mul_pd(are, x);
    const __m256d v = _mm256_mul_pd(aim, xswap);
    return _mm256_blend_pd(_mm256_add_pd(u, v), _mm256_sub_pd(v, u), 0xa);
}

void caxpy_avx2(std::size_t len, double ar, double ai, const double* x, double* y) {
    const __m256d are = _mm256_set1_pd(ar);
    const __m256d aim = _mm256_set1_pd(ai);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d xv = _mm256_loadu_pd(x + 2 * i);
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(yv, cmul2(are, aim, xv)));
    }
    for (; i < len; ++i) detail::caxpy_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void caxpy_conj_avx2(std::size_t len, double ar, double ai, const double* x, double* y) {
    const __m256d are = _mm256_set1_pd(ar);
    const __m256d aim = _mm256_set1_pd(ai);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d xv = _mm256_loadu_pd(x + 2 * i);
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(yv, cmul_conj2(are, aim, xv)));
    }
    for (; i < len; ++i) detail::caxpy_conj_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void cscale_store_avx2(std::size_t len, double ar, double ai, const double* x, double* y) {
    const __m256d are = _mm256_set1_pd(ar);
    const __m256d aim = _mm256_set1_pd(ai);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2)
        _mm256_storeu_pd(y + 2 * i, cmul2(are, aim, _mm256_loadu_pd(x + 2 * i)));
    for (; i < len; ++i) detail::cscale_store_elem(ar, ai, x + 2 * i, y + 2 * i);
}

void raxpy_avx2(std::size_t len, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    const std::size_t doubles = 2 * len;
    std::size_t i = 0;
    for (; i + 4 <= doubles; i += 4) {
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d xv = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
    }
    for (; i < doubles; ++i) y[i] += a * x[i];
}

void pair_rotate_avx2(std::size_t len, double ar, double ai, double br, double bi,
                      double gr, double gi, double dr, double di, double* x, double* y) {
    const __m256d are = _mm256_set1_pd(ar), aim = _mm256_set1_pd(ai);
    const __m256d bre = _mm256_set1_pd(br), bim = _mm256_set1_pd(bi);
    const __m256d gre = _mm256_set1_pd(gr), gim = _mm256_set1_pd(gi);
    const __m256d dre = _mm256_set1_pd(dr), dim = _mm256_set1_pd(di);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d xv = _mm256_loadu_pd(x + 2 * i);
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        const __m256d xn = _mm256_add_pd(cmul2(are, aim, xv), cmul2(bre, bim, yv));
        const __m256d yn = _mm256_add_pd(cmul2(gre, gim, xv), cmul2(dre, dim, yv));
        _mm256_storeu_pd(x + 2 * i, xn);
        _mm256_storeu_pd(y + 2 * i, yn);
    }
    for (; i < len; ++i)
        detail::pair_rotate_elem(ar, ai, br, bi, gr, gi, dr, di, x + 2 * i, y + 2 * i);
}

double sumsq_avx2(std::size_t len, const double* x) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t doubles = 2 * len;
    std::size_t i = 0;
    for (; i + 4 <= doubles; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, xv));
    }
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < doubles; ++i) out += x[i] * x[i];
    return out;
}

} // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

const Table* avx2_table() {
    static const Table table{
        "avx2",     caxpy_avx2, caxpy_conj_avx2, cscale_store_avx2,
        raxpy_avx2, pair_rotate_avx2, sumsq_avx2,
    };
    return &table;
}

} // namespace ccq::kernels

#else

namespace ccq::kernels {

bool avx2_supported() { return false; }
const Table* avx2_table() { return nullptr; }

} // namespace ccq::kernels

#endif
