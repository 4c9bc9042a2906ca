#pragma once

#include <cmath>
#include <cstddef>
#include <string>

namespace mimic::core::kernels {

/// Kernel backends. Scalar is the reference; the SIMD lanes are selected at
/// runtime from CPU capabilities and must agree with the reference (see the
/// equivalence tests). Elementwise and Adam kernels match the reference
/// bitwise; gemm lanes use FMA and agree within accumulation rounding.
enum class Backend { scalar, avx2, avx512, neon };

const char* backend_name(Backend b);

/// Active backend: best supported lane unless overridden by set_backend()
/// or the MIMIC_KERNELS environment variable (scalar|avx2|avx512|neon).
Backend active_backend();
void set_backend(Backend b);
bool backend_supported(Backend b);

struct Kernels {
    // C[MxN] (+)= A[MxK] * B[KxN], row-major.
    void (*sgemm)(const float* a, const float* b, float* c,
                  std::size_t m, std::size_t n, std::size_t k, bool accumulate);
    // C[MxN] (+)= A[MxK] * B[NxK]^T  (row dot products)
    void (*sgemm_nt)(const float* a, const float* b, float* c,
                     std::size_t m, std::size_t n, std::size_t k, bool accumulate);
    // C[MxN] (+)= A[KxM]^T * B[KxN]
    void (*sgemm_tn)(const float* a, const float* b, float* c,
                     std::size_t m, std::size_t n, std::size_t k, bool accumulate);
    // y = max(x, 0); backward dx = dy where x > 0.
    void (*relu_fwd)(const float* x, float* y, std::size_t n);
    void (*relu_bwd)(const float* x, const float* dy, float* dx, std::size_t n);
    void (*lrelu_fwd)(const float* x, float* y, std::size_t n, float slope);
    void (*lrelu_bwd)(const float* x, const float* dy, float* dx, std::size_t n, float slope);
    // y += a * x
    void (*axpy)(float a, const float* x, float* y, std::size_t n);
    // y = a * x + b
    void (*affine)(float a, float b, const float* x, float* y, std::size_t n);
    // Bias-corrected Adam update on one parameter array.
    void (*adam)(float* p, const float* g, float* m, float* v, std::size_t n,
                 float lr, float beta1, float beta2, float eps,
                 float bias1, float bias2);
};

/// Kernel table for the active backend.
const Kernels& active();

/// Kernel table for a specific backend (for equivalence tests). Throws if
/// the backend is not supported on this machine.
const Kernels& table(Backend b);

// Reference implementations, templated so the double-precision autodiff
// path (gradient checking) shares them.
namespace ref {

template <class T>
void gemm(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k,
          bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T* crow = c + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
        for (std::size_t kk = 0; kk < k; ++kk) {
            T av = a[i * k + kk];
            const T* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            T s = T(0);
            const T* arow = a + i * k;
            const T* brow = b + j * k;
            for (std::size_t kk = 0; kk < k; ++kk) s += arow[kk] * brow[kk];
            T* cp = c + i * n + j;
            *cp = accumulate ? *cp + s : s;
        }
}

template <class T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T* crow = c + i * n;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) crow[j] = T(0);
        for (std::size_t kk = 0; kk < k; ++kk) {
            T av = a[kk * m + i];
            const T* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void relu_fwd(const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <class T>
void relu_bwd(const T* x, const T* dy, T* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] += x[i] > T(0) ? dy[i] : T(0);
}

template <class T>
void lrelu_fwd(const T* x, T* y, std::size_t n, T slope) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

template <class T>
void lrelu_bwd(const T* x, const T* dy, T* dx, std::size_t n, T slope) {
    for (std::size_t i = 0; i < n; ++i) dx[i] += x[i] > T(0) ? dy[i] : slope * dy[i];
}

template <class T>
void axpy(T a, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T>
void affine(T a, T b, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

template <class T>
void adam(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T beta1, T beta2, T eps,
          T bias1, T bias2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
        v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
        T mhat = m[i] / bias1;
        T vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace ref

// im2col/col2im are pure data movement and stay scalar on every lane.
// cols is [C*kh*kw, Ho*Wo] row-major for one image [C,H,W].
template <class T>
void im2col(const T* img, int c, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, T* cols) {
    const std::size_t plane = static_cast<std::size_t>(ho) * wo;
    std::size_t row = 0;
    for (int ci = 0; ci < c; ++ci) {
        const T* src = img + static_cast<std::size_t>(ci) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                T* dst = cols + row * plane;
                for (int oy = 0; oy < ho; ++oy) {
                    int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) {
                        for (int ox = 0; ox < wo; ++ox) dst[oy * wo + ox] = T(0);
                        continue;
                    }
                    const T* srow = src + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        int ix = ox * stride - pad + kx;
                        dst[oy * wo + ox] = (ix >= 0 && ix < w) ? srow[ix] : T(0);
                    }
                }
            }
        }
    }
}

/// Adjoint of im2col: accumulate cols back into the image.
template <class T>
void col2im(const T* cols, int c, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, T* img) {
    const std::size_t plane = static_cast<std::size_t>(ho) * wo;
    std::size_t row = 0;
    for (int ci = 0; ci < c; ++ci) {
        T* dst = img + static_cast<std::size_t>(ci) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++row) {
                const T* src = cols + row * plane;
                for (int oy = 0; oy < ho; ++oy) {
                    int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    T* drow = dst + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < w) drow[ix] += src[oy * wo + ox];
                    }
                }
            }
        }
    }
}

template <class T>
void transpose2d(const T* a, T* at, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) at[j * rows + i] = a[i * cols + j];
}

// Typed entry points used by the ops layer: float routes through the active
// dispatch table, double through the reference (gradient-check path only).
template <class T>
struct dispatch {
    static void gemm(const T* a, const T* b, T* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) { ref::gemm(a, b, c, m, n, k, acc); }
    static void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t n,
                        std::size_t k, bool acc) { ref::gemm_nt(a, b, c, m, n, k, acc); }
    static void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t n,
                        std::size_t k, bool acc) { ref::gemm_tn(a, b, c, m, n, k, acc); }
    static void relu_fwd(const T* x, T* y, std::size_t n) { ref::relu_fwd(x, y, n); }
    static void relu_bwd(const T* x, const T* dy, T* dx, std::size_t n) {
        ref::relu_bwd(x, dy, dx, n);
    }
    static void lrelu_fwd(const T* x, T* y, std::size_t n, T s) { ref::lrelu_fwd(x, y, n, s); }
    static void lrelu_bwd(const T* x, const T* dy, T* dx, std::size_t n, T s) {
        ref::lrelu_bwd(x, dy, dx, n, s);
    }
    static void axpy(T a, const T* x, T* y, std::size_t n) { ref::axpy(a, x, y, n); }
    static void affine(T a, T b, const T* x, T* y, std::size_t n) { ref::affine(a, b, x, y, n); }
    static void adam(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T b1, T b2, T eps,
                     T c1, T c2) { ref::adam(p, g, m, v, n, lr, b1, b2, eps, c1, c2); }
};

template <>
struct dispatch<float> {
    static void gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) { active().sgemm(a, b, c, m, n, k, acc); }
    static void gemm_nt(const float* a, const float* b, float* c, std::size_t m,
                        std::size_t n, std::size_t k, bool acc) {
        active().sgemm_nt(a, b, c, m, n, k, acc);
    }
    static void gemm_tn(const float* a, const float* b, float* c, std::size_t m,
                        std::size_t n, std::size_t k, bool acc) {
        active().sgemm_tn(a, b, c, m, n, k, acc);
    }
    static void relu_fwd(const float* x, float* y, std::size_t n) { active().relu_fwd(x, y, n); }
    static void relu_bwd(const float* x, const float* dy, float* dx, std::size_t n) {
        active().relu_bwd(x, dy, dx, n);
    }
    static void lrelu_fwd(const float* x, float* y, std::size_t n, float s) {
        active().lrelu_fwd(x, y, n, s);
    }
    static void lrelu_bwd(const float* x, const float* dy, float* dx, std::size_t n, float s) {
        active().lrelu_bwd(x, dy, dx, n, s);
    }
    static void axpy(float a, const float* x, float* y, std::size_t n) {
        active().axpy(a, x, y, n);
    }
    static void affine(float a, float b, const float* x, float* y, std::size_t n) {
        active().affine(a, b, x, y, n);
    }
    static void adam(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
                     float b1, float b2, float eps, float c1, float c2) {
        active().adam(p, g, m, v, n, lr, b1, b2, eps, c1, c2);
    }
};

}  // namespace mimic::core::kernels
