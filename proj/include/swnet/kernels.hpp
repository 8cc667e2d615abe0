#pragma once

#include <cstddef>

#include "swnet/tensor.hpp"

namespace swnet::kern {

enum class Backend { scalar, avx2, neon };

/// Table of the hot inner-loop kernels. One scalar reference table always
/// exists; SIMD tables are compiled in where the toolchain supports them and
/// picked at runtime from CPU capabilities.
struct KernelTable {
    // c[m x n] += a[m x k] * b[k x n], all row-major contiguous
    void (*gemm_nn_acc)(const real* a, const real* b, real* c, int m, int k, int n);
    // c[m x n] += a[m x k] * b[n x k]^T
    void (*gemm_nt_acc)(const real* a, const real* b, real* c, int m, int k, int n);
    void (*add)(const real* a, const real* b, real* out, size_t n);
    void (*sub)(const real* a, const real* b, real* out, size_t n);
    void (*mul)(const real* a, const real* b, real* out, size_t n);
    void (*axpy)(real alpha, const real* x, real* y, size_t n);   // y += alpha*x
    void (*scale)(const real* x, real alpha, real* out, size_t n); // out = alpha*x
    real (*dot)(const real* a, const real* b, size_t n);
    real (*sum)(const real* x, size_t n);
};

/// Backend chosen for this process: best supported lane, overridable with
/// SWNET_KERNEL=scalar|avx2|neon (falls back to scalar when the requested
/// lane is unavailable). Stable for the lifetime of the process, so repeated
/// runs on one machine are bit-identical.
Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);

/// Dispatched table for `active_backend()`.
const KernelTable& kernels();
/// Specific table, for equivalence tests. Throws if unavailable.
const KernelTable& kernels(Backend b);

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

}  // namespace swnet::kern
