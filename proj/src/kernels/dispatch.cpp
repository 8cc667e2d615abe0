#include <cstdlib>
#include <stdexcept>
#include <string>

#include "swnet/kernels.hpp"

namespace swnet::kern {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("SWNET_KERNEL")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
        if (want == "neon" && backend_available(Backend::neon)) return Backend::neon;
        return Backend::scalar;
    }
#if defined(__aarch64__)
    return Backend::neon;
#else
    return cpu_has_avx2_fma() ? Backend::avx2 : Backend::scalar;
#endif
}

}  // namespace

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return cpu_has_avx2_fma();
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend active_backend() {
    static const Backend chosen = detect_backend();
    return chosen;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

const KernelTable& kernels(Backend b) {
    switch (b) {
        case Backend::scalar: return scalar_table();
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (backend_available(Backend::avx2)) return avx2_table();
#endif
            break;
        case Backend::neon:
#if defined(__aarch64__)
            return neon_table();
#else
            break;
#endif
    }
    throw std::runtime_error(std::string("kernel backend unavailable: ") + backend_name(b));
}

const KernelTable& kernels() {
    static const KernelTable& table = kernels(active_backend());
    return table;
}

}  // namespace swnet::kern
