// NEON kernel lane (aarch64 baseline). Mirrors the AVX2 lane: gemm uses
// fused multiply-add, the rest matches the scalar reference bitwise.

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include "mimic/core/kernels.hpp"

namespace mimic::core::kernels {

namespace {

void neon_sgemm(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                std::size_t k, bool acc) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const float* arow[4] = {a + i * k, a + (i + 1) * k, a + (i + 2) * k, a + (i + 3) * k};
        float* crow[4] = {c + i * n, c + (i + 1) * n, c + (i + 2) * n, c + (i + 3) * n};
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            float32x4_t s[4][2];
            for (int r = 0; r < 4; ++r) {
                s[r][0] = vdupq_n_f32(0.f);
                s[r][1] = vdupq_n_f32(0.f);
            }
            const float* bp = b + j;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                float32x4_t b0 = vld1q_f32(bp);
                float32x4_t b1 = vld1q_f32(bp + 4);
                for (int r = 0; r < 4; ++r) {
                    s[r][0] = vfmaq_n_f32(s[r][0], b0, arow[r][kk]);
                    s[r][1] = vfmaq_n_f32(s[r][1], b1, arow[r][kk]);
                }
            }
            for (int r = 0; r < 4; ++r) {
                if (acc) {
                    s[r][0] = vaddq_f32(s[r][0], vld1q_f32(crow[r] + j));
                    s[r][1] = vaddq_f32(s[r][1], vld1q_f32(crow[r] + j + 4));
                }
                vst1q_f32(crow[r] + j, s[r][0]);
                vst1q_f32(crow[r] + j + 4, s[r][1]);
            }
        }
        for (; j < n; ++j) {
            for (int r = 0; r < 4; ++r) {
                float s = 0.f;
                for (std::size_t kk = 0; kk < k; ++kk) s += arow[r][kk] * b[kk * n + j];
                crow[r][j] = acc ? crow[r][j] + s : s;
            }
        }
    }
    for (; i < m; ++i) {
        const float* ai = a + i * k;
        float* ci = c + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            float32x4_t s = vdupq_n_f32(0.f);
            for (std::size_t kk = 0; kk < k; ++kk)
                s = vfmaq_n_f32(s, vld1q_f32(b + kk * n + j), ai[kk]);
            if (acc) s = vaddq_f32(s, vld1q_f32(ci + j));
            vst1q_f32(ci + j, s);
        }
        for (; j < n; ++j) {
            float s = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) s += ai[kk] * b[kk * n + j];
            ci[j] = acc ? ci[j] + s : s;
        }
    }
}

void neon_sgemm_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                   std::size_t k, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const float* brow = b + j * k;
            float32x4_t s = vdupq_n_f32(0.f);
            std::size_t kk = 0;
            for (; kk + 4 <= k; kk += 4)
                s = vfmaq_f32(s, vld1q_f32(arow + kk), vld1q_f32(brow + kk));
            float d = vaddvq_f32(s);
            for (; kk < k; ++kk) d += arow[kk] * brow[kk];
            float* cp = c + i * n + j;
            *cp = acc ? *cp + d : d;
        }
    }
}

void neon_sgemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                   std::size_t k, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        float* ci = c + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            float32x4_t s = vdupq_n_f32(0.f);
            for (std::size_t kk = 0; kk < k; ++kk)
                s = vfmaq_n_f32(s, vld1q_f32(b + kk * n + j), a[kk * m + i]);
            if (acc) s = vaddq_f32(s, vld1q_f32(ci + j));
            vst1q_f32(ci + j, s);
        }
        for (; j < n; ++j) {
            float s = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) s += a[kk * m + i] * b[kk * n + j];
            ci[j] = acc ? ci[j] + s : s;
        }
    }
}

void neon_relu_fwd(const float* x, float* y, std::size_t n) {
    const float32x4_t zero = vdupq_n_f32(0.f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vmaxq_f32(vld1q_f32(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : 0.f;
}

void neon_relu_bwd(const float* x, const float* dy, float* dx, std::size_t n) {
    const float32x4_t zero = vdupq_n_f32(0.f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        uint32x4_t mask = vcgtq_f32(vld1q_f32(x + i), zero);
        float32x4_t g = vreinterpretq_f32_u32(
            vandq_u32(vreinterpretq_u32_f32(vld1q_f32(dy + i)), mask));
        vst1q_f32(dx + i, vaddq_f32(vld1q_f32(dx + i), g));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : 0.f;
}

void neon_lrelu_fwd(const float* x, float* y, std::size_t n, float slope) {
    const float32x4_t zero = vdupq_n_f32(0.f);
    const float32x4_t sl = vdupq_n_f32(slope);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t v = vld1q_f32(x + i);
        uint32x4_t mask = vcgtq_f32(v, zero);
        vst1q_f32(y + i, vbslq_f32(mask, v, vmulq_f32(sl, v)));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : slope * x[i];
}

void neon_lrelu_bwd(const float* x, const float* dy, float* dx, std::size_t n, float slope) {
    const float32x4_t zero = vdupq_n_f32(0.f);
    const float32x4_t sl = vdupq_n_f32(slope);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t g = vld1q_f32(dy + i);
        uint32x4_t mask = vcgtq_f32(vld1q_f32(x + i), zero);
        float32x4_t d = vbslq_f32(mask, g, vmulq_f32(sl, g));
        vst1q_f32(dx + i, vaddq_f32(vld1q_f32(dx + i), d));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : slope * dy[i];
}

void neon_axpy(float a, const float* x, float* y, std::size_t n) {
    const float32x4_t av = vdupq_n_f32(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t t = vmulq_f32(av, vld1q_f32(x + i));
        vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), t));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void neon_affine(float a, float b, const float* x, float* y, std::size_t n) {
    const float32x4_t av = vdupq_n_f32(a);
    const float32x4_t bv = vdupq_n_f32(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vst1q_f32(y + i, vaddq_f32(vmulq_f32(av, vld1q_f32(x + i)), bv));
    for (; i < n; ++i) y[i] = a * x[i] + b;
}

void neon_adam(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
               float beta1, float beta2, float eps, float bias1, float bias2) {
    const float32x4_t b1 = vdupq_n_f32(beta1), ob1 = vdupq_n_f32(1.f - beta1);
    const float32x4_t b2 = vdupq_n_f32(beta2), ob2 = vdupq_n_f32(1.f - beta2);
    const float32x4_t c1 = vdupq_n_f32(bias1), c2 = vdupq_n_f32(bias2);
    const float32x4_t lrv = vdupq_n_f32(lr), epsv = vdupq_n_f32(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t gv = vld1q_f32(g + i);
        float32x4_t mv = vaddq_f32(vmulq_f32(b1, vld1q_f32(m + i)), vmulq_f32(ob1, gv));
        float32x4_t vv = vaddq_f32(vmulq_f32(b2, vld1q_f32(v + i)),
                                   vmulq_f32(vmulq_f32(ob2, gv), gv));
        vst1q_f32(m + i, mv);
        vst1q_f32(v + i, vv);
        float32x4_t mhat = vdivq_f32(mv, c1);
        float32x4_t vhat = vdivq_f32(vv, c2);
        float32x4_t denom = vaddq_f32(vsqrtq_f32(vhat), epsv);
        float32x4_t step = vdivq_f32(vmulq_f32(lrv, mhat), denom);
        vst1q_f32(p + i, vsubq_f32(vld1q_f32(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.f - beta2) * g[i] * g[i];
        float mhat = m[i] / bias1;
        float vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

constexpr Kernels kNeon = {
    neon_sgemm, neon_sgemm_nt, neon_sgemm_tn, neon_relu_fwd, neon_relu_bwd,
    neon_lrelu_fwd, neon_lrelu_bwd, neon_axpy, neon_affine, neon_adam,
};

}  // namespace

const Kernels& neon_table() { return kNeon; }

}  // namespace mimic::core::kernels

#endif  // ARM
