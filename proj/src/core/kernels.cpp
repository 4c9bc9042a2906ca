#include "mimic/core/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mimic::core::kernels {

namespace {

void scalar_sgemm(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                  std::size_t k, bool acc) { ref::gemm(a, b, c, m, n, k, acc); }
void scalar_sgemm_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) { ref::gemm_nt(a, b, c, m, n, k, acc); }
void scalar_sgemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) { ref::gemm_tn(a, b, c, m, n, k, acc); }
void scalar_relu_fwd(const float* x, float* y, std::size_t n) { ref::relu_fwd(x, y, n); }
void scalar_relu_bwd(const float* x, const float* dy, float* dx, std::size_t n) {
    ref::relu_bwd(x, dy, dx, n);
}
void scalar_lrelu_fwd(const float* x, float* y, std::size_t n, float s) {
    ref::lrelu_fwd(x, y, n, s);
}
void scalar_lrelu_bwd(const float* x, const float* dy, float* dx, std::size_t n, float s) {
    ref::lrelu_bwd(x, dy, dx, n, s);
}
void scalar_axpy(float a, const float* x, float* y, std::size_t n) { ref::axpy(a, x, y, n); }
void scalar_affine(float a, float b, const float* x, float* y, std::size_t n) {
    ref::affine(a, b, x, y, n);
}
void scalar_adam(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
                 float b1, float b2, float eps, float c1, float c2) {
    ref::adam(p, g, m, v, n, lr, b1, b2, eps, c1, c2);
}

constexpr Kernels kScalar = {
    scalar_sgemm, scalar_sgemm_nt, scalar_sgemm_tn, scalar_relu_fwd, scalar_relu_bwd,
    scalar_lrelu_fwd, scalar_lrelu_bwd, scalar_axpy, scalar_affine, scalar_adam,
};

Backend detect_best() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx512f")) return Backend::avx512;
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
    return Backend::scalar;
#elif defined(__aarch64__) || defined(__ARM_NEON)
    return Backend::neon;
#else
    return Backend::scalar;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("MIMIC_KERNELS")) {
        std::string s(env);
        Backend want = Backend::scalar;
        if (s == "scalar") want = Backend::scalar;
        else if (s == "avx2") want = Backend::avx2;
        else if (s == "avx512") want = Backend::avx512;
        else if (s == "neon") want = Backend::neon;
        else return detect_best();
        if (backend_supported(want)) return want;
    }
    return detect_best();
}

Backend& current() {
    static Backend b = initial_backend();
    return b;
}

}  // namespace

#if defined(__x86_64__) || defined(__i386__)
const Kernels& avx2_table();    // kernels_avx2.cpp
const Kernels& avx512_table();  // kernels_avx512.cpp
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
const Kernels& neon_table();    // kernels_neon.cpp
#endif

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::avx512: return "avx512";
        case Backend::neon: return "neon";
    }
    return "?";
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::avx512:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx512f");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend active_backend() { return current(); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error(std::string("kernel backend not supported here: ") +
                                 backend_name(b));
    current() = b;
}

const Kernels& table(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error(std::string("kernel backend not supported here: ") +
                                 backend_name(b));
    switch (b) {
        case Backend::scalar: return kScalar;
#if defined(__x86_64__) || defined(__i386__)
        case Backend::avx2: return avx2_table();
        case Backend::avx512: return avx512_table();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
        case Backend::neon: return neon_table();
#endif
        default: return kScalar;
    }
}

const Kernels& active() { return table(current()); }

}  // namespace mimic::core::kernels
