// AVX-512F kernel lane. Same contract as the AVX2 lane: gemm uses FMA, the
// remaining kernels match the scalar reference bitwise.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "mimic/core/kernels.hpp"

namespace mimic::core::kernels {

namespace {

__attribute__((target("avx512f")))
void gemm_rows1_512(const float* a, const float* b, float* c, std::size_t n, std::size_t k,
                    bool acc) {
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        __m512 s = _mm512_setzero_ps();
        for (std::size_t kk = 0; kk < k; ++kk)
            s = _mm512_fmadd_ps(_mm512_set1_ps(a[kk]), _mm512_loadu_ps(b + kk * n + j), s);
        if (acc) s = _mm512_add_ps(s, _mm512_loadu_ps(c + j));
        _mm512_storeu_ps(c + j, s);
    }
    for (; j < n; ++j) {
        float s = 0.f;
        for (std::size_t kk = 0; kk < k; ++kk) s += a[kk] * b[kk * n + j];
        c[j] = acc ? c[j] + s : s;
    }
}

__attribute__((target("avx512f")))
void avx512_sgemm(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                  std::size_t k, bool acc) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const float* arow[4] = {a + i * k, a + (i + 1) * k, a + (i + 2) * k, a + (i + 3) * k};
        float* crow[4] = {c + i * n, c + (i + 1) * n, c + (i + 2) * n, c + (i + 3) * n};
        std::size_t j = 0;
        for (; j + 32 <= n; j += 32) {
            __m512 s[4][2];
            for (int r = 0; r < 4; ++r) {
                s[r][0] = _mm512_setzero_ps();
                s[r][1] = _mm512_setzero_ps();
            }
            const float* bp = b + j;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                __m512 b0 = _mm512_loadu_ps(bp);
                __m512 b1 = _mm512_loadu_ps(bp + 16);
                for (int r = 0; r < 4; ++r) {
                    __m512 av = _mm512_set1_ps(arow[r][kk]);
                    s[r][0] = _mm512_fmadd_ps(av, b0, s[r][0]);
                    s[r][1] = _mm512_fmadd_ps(av, b1, s[r][1]);
                }
            }
            for (int r = 0; r < 4; ++r) {
                if (acc) {
                    s[r][0] = _mm512_add_ps(s[r][0], _mm512_loadu_ps(crow[r] + j));
                    s[r][1] = _mm512_add_ps(s[r][1], _mm512_loadu_ps(crow[r] + j + 16));
                }
                _mm512_storeu_ps(crow[r] + j, s[r][0]);
                _mm512_storeu_ps(crow[r] + j + 16, s[r][1]);
            }
        }
        for (; j + 16 <= n; j += 16) {
            __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
            __m512 s2 = _mm512_setzero_ps(), s3 = _mm512_setzero_ps();
            const float* bp = b + j;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                __m512 bv = _mm512_loadu_ps(bp);
                s0 = _mm512_fmadd_ps(_mm512_set1_ps(arow[0][kk]), bv, s0);
                s1 = _mm512_fmadd_ps(_mm512_set1_ps(arow[1][kk]), bv, s1);
                s2 = _mm512_fmadd_ps(_mm512_set1_ps(arow[2][kk]), bv, s2);
                s3 = _mm512_fmadd_ps(_mm512_set1_ps(arow[3][kk]), bv, s3);
            }
            if (acc) {
                s0 = _mm512_add_ps(s0, _mm512_loadu_ps(crow[0] + j));
                s1 = _mm512_add_ps(s1, _mm512_loadu_ps(crow[1] + j));
                s2 = _mm512_add_ps(s2, _mm512_loadu_ps(crow[2] + j));
                s3 = _mm512_add_ps(s3, _mm512_loadu_ps(crow[3] + j));
            }
            _mm512_storeu_ps(crow[0] + j, s0);
            _mm512_storeu_ps(crow[1] + j, s1);
            _mm512_storeu_ps(crow[2] + j, s2);
            _mm512_storeu_ps(crow[3] + j, s3);
        }
        for (; j < n; ++j) {
            for (int r = 0; r < 4; ++r) {
                float s = 0.f;
                for (std::size_t kk = 0; kk < k; ++kk) s += arow[r][kk] * b[kk * n + j];
                crow[r][j] = acc ? crow[r][j] + s : s;
            }
        }
    }
    for (; i < m; ++i) gemm_rows1_512(a + i * k, b, c + i * n, n, k, acc);
}

__attribute__((target("avx512f")))
float hsum16(__m512 v) { return _mm512_reduce_add_ps(v); }

__attribute__((target("avx512f")))
void avx512_sgemm_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const float* b0 = b + j * k;
            const float* b1 = b0 + k;
            __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
            std::size_t kk = 0;
            for (; kk + 16 <= k; kk += 16) {
                __m512 av = _mm512_loadu_ps(arow + kk);
                s0 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b0 + kk), s0);
                s1 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b1 + kk), s1);
            }
            float d0 = hsum16(s0), d1 = hsum16(s1);
            for (; kk < k; ++kk) {
                d0 += arow[kk] * b0[kk];
                d1 += arow[kk] * b1[kk];
            }
            float* cp = c + i * n + j;
            cp[0] = acc ? cp[0] + d0 : d0;
            cp[1] = acc ? cp[1] + d1 : d1;
        }
        for (; j < n; ++j) {
            const float* brow = b + j * k;
            __m512 s = _mm512_setzero_ps();
            std::size_t kk = 0;
            for (; kk + 16 <= k; kk += 16)
                s = _mm512_fmadd_ps(_mm512_loadu_ps(arow + kk), _mm512_loadu_ps(brow + kk), s);
            float d = hsum16(s);
            for (; kk < k; ++kk) d += arow[kk] * brow[kk];
            float* cp = c + i * n + j;
            *cp = acc ? *cp + d : d;
        }
    }
}

__attribute__((target("avx512f")))
void avx512_sgemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                     std::size_t k, bool acc) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        float* crow[4] = {c + i * n, c + (i + 1) * n, c + (i + 2) * n, c + (i + 3) * n};
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
            __m512 s2 = _mm512_setzero_ps(), s3 = _mm512_setzero_ps();
            const float* bp = b + j;
            const float* ap = a + i;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n, ap += m) {
                __m512 bv = _mm512_loadu_ps(bp);
                s0 = _mm512_fmadd_ps(_mm512_set1_ps(ap[0]), bv, s0);
                s1 = _mm512_fmadd_ps(_mm512_set1_ps(ap[1]), bv, s1);
                s2 = _mm512_fmadd_ps(_mm512_set1_ps(ap[2]), bv, s2);
                s3 = _mm512_fmadd_ps(_mm512_set1_ps(ap[3]), bv, s3);
            }
            if (acc) {
                s0 = _mm512_add_ps(s0, _mm512_loadu_ps(crow[0] + j));
                s1 = _mm512_add_ps(s1, _mm512_loadu_ps(crow[1] + j));
                s2 = _mm512_add_ps(s2, _mm512_loadu_ps(crow[2] + j));
                s3 = _mm512_add_ps(s3, _mm512_loadu_ps(crow[3] + j));
            }
            _mm512_storeu_ps(crow[0] + j, s0);
            _mm512_storeu_ps(crow[1] + j, s1);
            _mm512_storeu_ps(crow[2] + j, s2);
            _mm512_storeu_ps(crow[3] + j, s3);
        }
        for (; j < n; ++j) {
            for (int r = 0; r < 4; ++r) {
                float s = 0.f;
                for (std::size_t kk = 0; kk < k; ++kk) s += a[kk * m + i + r] * b[kk * n + j];
                crow[r][j] = acc ? crow[r][j] + s : s;
            }
        }
    }
    for (; i < m; ++i) {
        float* ci = c + i * n;
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m512 s = _mm512_setzero_ps();
            for (std::size_t kk = 0; kk < k; ++kk)
                s = _mm512_fmadd_ps(_mm512_set1_ps(a[kk * m + i]),
                                    _mm512_loadu_ps(b + kk * n + j), s);
            if (acc) s = _mm512_add_ps(s, _mm512_loadu_ps(ci + j));
            _mm512_storeu_ps(ci + j, s);
        }
        for (; j < n; ++j) {
            float s = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) s += a[kk * m + i] * b[kk * n + j];
            ci[j] = acc ? ci[j] + s : s;
        }
    }
}

__attribute__((target("avx512f")))
void avx512_relu_fwd(const float* x, float* y, std::size_t n) {
    const __m512 zero = _mm512_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16)
        _mm512_storeu_ps(y + i, _mm512_max_ps(_mm512_loadu_ps(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : 0.f;
}

__attribute__((target("avx512f")))
void avx512_relu_bwd(const float* x, const float* dy, float* dx, std::size_t n) {
    const __m512 zero = _mm512_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __mmask16 mask = _mm512_cmp_ps_mask(_mm512_loadu_ps(x + i), zero, _CMP_GT_OQ);
        __m512 g = _mm512_maskz_mov_ps(mask, _mm512_loadu_ps(dy + i));
        _mm512_storeu_ps(dx + i, _mm512_add_ps(_mm512_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : 0.f;
}

__attribute__((target("avx512f")))
void avx512_lrelu_fwd(const float* x, float* y, std::size_t n, float slope) {
    const __m512 zero = _mm512_setzero_ps();
    const __m512 sl = _mm512_set1_ps(slope);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m512 v = _mm512_loadu_ps(x + i);
        __mmask16 mask = _mm512_cmp_ps_mask(v, zero, _CMP_GT_OQ);
        _mm512_storeu_ps(y + i, _mm512_mask_mov_ps(_mm512_mul_ps(sl, v), mask, v));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : slope * x[i];
}

__attribute__((target("avx512f")))
void avx512_lrelu_bwd(const float* x, const float* dy, float* dx, std::size_t n, float slope) {
    const __m512 zero = _mm512_setzero_ps();
    const __m512 sl = _mm512_set1_ps(slope);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m512 g = _mm512_loadu_ps(dy + i);
        __mmask16 mask = _mm512_cmp_ps_mask(_mm512_loadu_ps(x + i), zero, _CMP_GT_OQ);
        __m512 d = _mm512_mask_mov_ps(_mm512_mul_ps(sl, g), mask, g);
        _mm512_storeu_ps(dx + i, _mm512_add_ps(_mm512_loadu_ps(dx + i), d));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : slope * dy[i];
}

__attribute__((target("avx512f")))
void avx512_axpy(float a, const float* x, float* y, std::size_t n) {
    const __m512 av = _mm512_set1_ps(a);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m512 t = _mm512_mul_ps(av, _mm512_loadu_ps(x + i));
        _mm512_storeu_ps(y + i, _mm512_add_ps(_mm512_loadu_ps(y + i), t));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx512f")))
void avx512_affine(float a, float b, const float* x, float* y, std::size_t n) {
    const __m512 av = _mm512_set1_ps(a);
    const __m512 bv = _mm512_set1_ps(b);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16)
        _mm512_storeu_ps(y + i, _mm512_add_ps(_mm512_mul_ps(av, _mm512_loadu_ps(x + i)), bv));
    for (; i < n; ++i) y[i] = a * x[i] + b;
}

__attribute__((target("avx512f")))
void avx512_adam(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
                 float beta1, float beta2, float eps, float bias1, float bias2) {
    const __m512 b1 = _mm512_set1_ps(beta1), ob1 = _mm512_set1_ps(1.f - beta1);
    const __m512 b2 = _mm512_set1_ps(beta2), ob2 = _mm512_set1_ps(1.f - beta2);
    const __m512 c1 = _mm512_set1_ps(bias1), c2 = _mm512_set1_ps(bias2);
    const __m512 lrv = _mm512_set1_ps(lr), epsv = _mm512_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m512 gv = _mm512_loadu_ps(g + i);
        __m512 mv = _mm512_add_ps(_mm512_mul_ps(b1, _mm512_loadu_ps(m + i)),
                                  _mm512_mul_ps(ob1, gv));
        __m512 vv = _mm512_add_ps(_mm512_mul_ps(b2, _mm512_loadu_ps(v + i)),
                                  _mm512_mul_ps(_mm512_mul_ps(ob2, gv), gv));
        _mm512_storeu_ps(m + i, mv);
        _mm512_storeu_ps(v + i, vv);
        __m512 mhat = _mm512_div_ps(mv, c1);
        __m512 vhat = _mm512_div_ps(vv, c2);
        __m512 denom = _mm512_add_ps(_mm512_sqrt_ps(vhat), epsv);
        __m512 step = _mm512_div_ps(_mm512_mul_ps(lrv, mhat), denom);
        _mm512_storeu_ps(p + i, _mm512_sub_ps(_mm512_loadu_ps(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.f - beta2) * g[i] * g[i];
        float mhat = m[i] / bias1;
        float vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

constexpr Kernels kAvx512 = {
    avx512_sgemm, avx512_sgemm_nt, avx512_sgemm_tn, avx512_relu_fwd, avx512_relu_bwd,
    avx512_lrelu_fwd, avx512_lrelu_bwd, avx512_axpy, avx512_affine, avx512_adam,
};

}  // namespace

const Kernels& avx512_table() { return kAvx512; }

}  // namespace mimic::core::kernels

#endif  // x86
