// Reference kernels. Plain loops, ascending index order; every SIMD lane is
// equivalence-tested against these.

#include "swnet/kernels.hpp"

namespace swnet::kern {
namespace {

void gemm_nn_acc_scalar(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        real* crow = c + static_cast<size_t>(i) * n;
        const real* arow = a + static_cast<size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const real av = arow[kk];
            if (av == real(0)) continue;
            const real* brow = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_nt_acc_scalar(const real* a, const real* b, real* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const real* arow = a + static_cast<size_t>(i) * k;
        real* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const real* brow = b + static_cast<size_t>(j) * k;
            real acc = 0;
            for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
            crow[j] += acc;
        }
    }
}

void add_scalar(const real* a, const real* b, real* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const real* a, const real* b, real* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_scalar(const real* a, const real* b, real* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_scalar(real alpha, const real* x, real* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(const real* x, real alpha, real* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

real dot_scalar(const real* a, const real* b, size_t n) {
    real acc = 0;
    for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

real sum_scalar(const real* x, size_t n) {
    real acc = 0;
    for (size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        gemm_nn_acc_scalar, gemm_nt_acc_scalar, add_scalar,   sub_scalar, mul_scalar,
        axpy_scalar,        scale_scalar,       dot_scalar,   sum_scalar,
    };
    return table;
}

}  // namespace swnet::kern
