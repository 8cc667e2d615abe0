// AVX2/FMA lane, f64 x 4. This translation unit is compiled with
// -mavx2 -mfma; callers must gate on the runtime CPU check in dispatch.cpp.

#include "swnet/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace swnet::kern {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void gemm_nn_acc_avx2(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const real* arow = a + static_cast<size_t>(i) * k;
        real* crow = c + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const real av = arow[kk];
            if (av == real(0)) continue;
            const real* brow = b + static_cast<size_t>(kk) * n;
            const __m256d va = _mm256_set1_pd(av);
            int j = 0;
            for (; j + 16 <= n; j += 16) {
                __m256d c0 = _mm256_loadu_pd(crow + j);
                __m256d c1 = _mm256_loadu_pd(crow + j + 4);
                __m256d c2 = _mm256_loadu_pd(crow + j + 8);
                __m256d c3 = _mm256_loadu_pd(crow + j + 12);
                c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), c0);
                c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j + 4), c1);
                c2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j + 8), c2);
                c3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j + 12), c3);
                _mm256_storeu_pd(crow + j, c0);
                _mm256_storeu_pd(crow + j + 4, c1);
                _mm256_storeu_pd(crow + j + 8, c2);
                _mm256_storeu_pd(crow + j + 12, c3);
            }
            for (; j + 4 <= n; j += 4) {
                __m256d c0 = _mm256_loadu_pd(crow + j);
                c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), c0);
                _mm256_storeu_pd(crow + j, c0);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_acc_avx2(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const real* arow = a + static_cast<size_t>(i) * k;
        real* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const real* brow = b + static_cast<size_t>(j) * k;
            __m256d acc = _mm256_setzero_pd();
            int kk = 0;
            for (; kk + 4 <= k; kk += 4)
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + kk), _mm256_loadu_pd(brow + kk), acc);
            real tail = 0;
            for (; kk < k; ++kk) tail += arow[kk] * brow[kk];
            crow[j] += hsum(acc) + tail;
        }
    }
}

void add_avx2(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_avx2(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_avx2(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_avx2(real alpha, const real* x, real* y, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(const real* x, real alpha, real* out, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = alpha * x[i];
}

real dot_avx2(const real* a, const real* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    real tail = 0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return hsum(acc) + tail;
}

real sum_avx2(const real* x, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    real tail = 0;
    for (; i < n; ++i) tail += x[i];
    return hsum(acc) + tail;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        gemm_nn_acc_avx2, gemm_nt_acc_avx2, add_avx2,  sub_avx2, mul_avx2,
        axpy_avx2,        scale_avx2,       dot_avx2,  sum_avx2,
    };
    return table;
}

}  // namespace swnet::kern

#endif  // x86_64
