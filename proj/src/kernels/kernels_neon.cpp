// NEON lane, f64 x 2 (aarch64 baseline).

#include "swnet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace swnet::kern {
namespace {

void gemm_nn_acc_neon(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const real* arow = a + static_cast<size_t>(i) * k;
        real* crow = c + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const real av = arow[kk];
            if (av == real(0)) continue;
            const real* brow = b + static_cast<size_t>(kk) * n;
            const float64x2_t va = vdupq_n_f64(av);
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                float64x2_t c0 = vld1q_f64(crow + j);
                float64x2_t c1 = vld1q_f64(crow + j + 2);
                c0 = vfmaq_f64(c0, va, vld1q_f64(brow + j));
                c1 = vfmaq_f64(c1, va, vld1q_f64(brow + j + 2));
                vst1q_f64(crow + j, c0);
                vst1q_f64(crow + j + 2, c1);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_acc_neon(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const real* arow = a + static_cast<size_t>(i) * k;
        real* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const real* brow = b + static_cast<size_t>(j) * k;
            float64x2_t acc = vdupq_n_f64(0.0);
            int kk = 0;
            for (; kk + 2 <= k; kk += 2)
                acc = vfmaq_f64(acc, vld1q_f64(arow + kk), vld1q_f64(brow + kk));
            real tail = vaddvq_f64(acc);
            for (; kk < k; ++kk) tail += arow[kk] * brow[kk];
            crow[j] += tail;
        }
    }
}

void add_neon(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_neon(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_neon(const real* a, const real* b, real* out, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_neon(real alpha, const real* x, real* y, size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(const real* x, real alpha, real* out, size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) out[i] = alpha * x[i];
}

real dot_neon(const real* a, const real* b, size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    real tail = vaddvq_f64(acc);
    for (; i < n; ++i) tail += a[i] * b[i];
    return tail;
}

real sum_neon(const real* x, size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    real tail = vaddvq_f64(acc);
    for (; i < n; ++i) tail += x[i];
    return tail;
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{
        gemm_nn_acc_neon, gemm_nt_acc_neon, add_neon,  sub_neon, mul_neon,
        axpy_neon,        scale_neon,       dot_neon,  sum_neon,
    };
    return table;
}

}  // namespace swnet::kern

#endif  // aarch64
