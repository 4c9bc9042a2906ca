// AVX2+FMA kernel lane. gemm carries the training load; everything else is
// kept bitwise-identical to the scalar reference (no FMA outside gemm, and
// VSQRTPS/VDIVPS round the same as their scalar forms).

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "mimic/core/kernels.hpp"

namespace mimic::core::kernels {

namespace {

__attribute__((target("avx2,fma")))
void gemm_rows1(const float* a, const float* b, float* c, std::size_t n, std::size_t k,
                bool acc) {
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        __m256 s = _mm256_setzero_ps();
        for (std::size_t kk = 0; kk < k; ++kk)
            s = _mm256_fmadd_ps(_mm256_set1_ps(a[kk]), _mm256_loadu_ps(b + kk * n + j), s);
        if (acc) s = _mm256_add_ps(s, _mm256_loadu_ps(c + j));
        _mm256_storeu_ps(c + j, s);
    }
    for (; j < n; ++j) {
        float s = 0.f;
        for (std::size_t kk = 0; kk < k; ++kk) s += a[kk] * b[kk * n + j];
        c[j] = acc ? c[j] + s : s;
    }
}

__attribute__((target("avx2,fma")))
void avx2_sgemm(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                std::size_t k, bool acc) {
    std::size_t i = 0;
    // 4 rows x 16 columns of accumulators per k sweep.
    for (; i + 4 <= m; i += 4) {
        const float* a0 = a + (i + 0) * k;
        const float* a1 = a + (i + 1) * k;
        const float* a2 = a + (i + 2) * k;
        const float* a3 = a + (i + 3) * k;
        float* c0 = c + (i + 0) * n;
        float* c1 = c + (i + 1) * n;
        float* c2 = c + (i + 2) * n;
        float* c3 = c + (i + 3) * n;
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m256 s00 = _mm256_setzero_ps(), s01 = _mm256_setzero_ps();
            __m256 s10 = _mm256_setzero_ps(), s11 = _mm256_setzero_ps();
            __m256 s20 = _mm256_setzero_ps(), s21 = _mm256_setzero_ps();
            __m256 s30 = _mm256_setzero_ps(), s31 = _mm256_setzero_ps();
            const float* bp = b + j;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                __m256 b0 = _mm256_loadu_ps(bp);
                __m256 b1 = _mm256_loadu_ps(bp + 8);
                __m256 v0 = _mm256_set1_ps(a0[kk]);
                __m256 v1 = _mm256_set1_ps(a1[kk]);
                __m256 v2 = _mm256_set1_ps(a2[kk]);
                __m256 v3 = _mm256_set1_ps(a3[kk]);
                s00 = _mm256_fmadd_ps(v0, b0, s00);
                s01 = _mm256_fmadd_ps(v0, b1, s01);
                s10 = _mm256_fmadd_ps(v1, b0, s10);
                s11 = _mm256_fmadd_ps(v1, b1, s11);
                s20 = _mm256_fmadd_ps(v2, b0, s20);
                s21 = _mm256_fmadd_ps(v2, b1, s21);
                s30 = _mm256_fmadd_ps(v3, b0, s30);
                s31 = _mm256_fmadd_ps(v3, b1, s31);
            }
            if (acc) {
                s00 = _mm256_add_ps(s00, _mm256_loadu_ps(c0 + j));
                s01 = _mm256_add_ps(s01, _mm256_loadu_ps(c0 + j + 8));
                s10 = _mm256_add_ps(s10, _mm256_loadu_ps(c1 + j));
                s11 = _mm256_add_ps(s11, _mm256_loadu_ps(c1 + j + 8));
                s20 = _mm256_add_ps(s20, _mm256_loadu_ps(c2 + j));
                s21 = _mm256_add_ps(s21, _mm256_loadu_ps(c2 + j + 8));
                s30 = _mm256_add_ps(s30, _mm256_loadu_ps(c3 + j));
                s31 = _mm256_add_ps(s31, _mm256_loadu_ps(c3 + j + 8));
            }
            _mm256_storeu_ps(c0 + j, s00); _mm256_storeu_ps(c0 + j + 8, s01);
            _mm256_storeu_ps(c1 + j, s10); _mm256_storeu_ps(c1 + j + 8, s11);
            _mm256_storeu_ps(c2 + j, s20); _mm256_storeu_ps(c2 + j + 8, s21);
            _mm256_storeu_ps(c3 + j, s30); _mm256_storeu_ps(c3 + j + 8, s31);
        }
        for (; j + 8 <= n; j += 8) {
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
            const float* bp = b + j;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                __m256 bv = _mm256_loadu_ps(bp);
                s0 = _mm256_fmadd_ps(_mm256_set1_ps(a0[kk]), bv, s0);
                s1 = _mm256_fmadd_ps(_mm256_set1_ps(a1[kk]), bv, s1);
                s2 = _mm256_fmadd_ps(_mm256_set1_ps(a2[kk]), bv, s2);
                s3 = _mm256_fmadd_ps(_mm256_set1_ps(a3[kk]), bv, s3);
            }
            if (acc) {
                s0 = _mm256_add_ps(s0, _mm256_loadu_ps(c0 + j));
                s1 = _mm256_add_ps(s1, _mm256_loadu_ps(c1 + j));
                s2 = _mm256_add_ps(s2, _mm256_loadu_ps(c2 + j));
                s3 = _mm256_add_ps(s3, _mm256_loadu_ps(c3 + j));
            }
            _mm256_storeu_ps(c0 + j, s0);
            _mm256_storeu_ps(c1 + j, s1);
            _mm256_storeu_ps(c2 + j, s2);
            _mm256_storeu_ps(c3 + j, s3);
        }
        for (; j < n; ++j) {
            float s0 = 0.f, s1 = 0.f, s2 = 0.f, s3 = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) {
                float bv = b[kk * n + j];
                s0 += a0[kk] * bv;
                s1 += a1[kk] * bv;
                s2 += a2[kk] * bv;
                s3 += a3[kk] * bv;
            }
            c0[j] = acc ? c0[j] + s0 : s0;
            c1[j] = acc ? c1[j] + s1 : s1;
            c2[j] = acc ? c2[j] + s2 : s2;
            c3[j] = acc ? c3[j] + s3 : s3;
        }
    }
    for (; i < m; ++i) gemm_rows1(a + i * k, b, c + i * n, n, k, acc);
}

__attribute__((target("avx2,fma")))
float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 1));
    return _mm_cvtss_f32(s);
}

// C[MxN] (+)= A[MxK] * B[NxK]^T: blocks of 4 rows x 2 cols of dot products.
__attribute__((target("avx2,fma")))
void avx2_sgemm_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                   std::size_t k, bool acc) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const float* b0 = b + j * k;
            const float* b1 = b0 + k;
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            std::size_t kk = 0;
            for (; kk + 8 <= k; kk += 8) {
                __m256 av = _mm256_loadu_ps(arow + kk);
                s0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b0 + kk), s0);
                s1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b1 + kk), s1);
            }
            float d0 = hsum8(s0), d1 = hsum8(s1);
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
            __m256 s = _mm256_setzero_ps();
            std::size_t kk = 0;
            for (; kk + 8 <= k; kk += 8)
                s = _mm256_fmadd_ps(_mm256_loadu_ps(arow + kk), _mm256_loadu_ps(brow + kk), s);
            float d = hsum8(s);
            for (; kk < k; ++kk) d += arow[kk] * brow[kk];
            float* cp = c + i * n + j;
            *cp = acc ? *cp + d : d;
        }
    }
}

// C[MxN] (+)= A[KxM]^T * B[KxN]: the nn kernel with A read down a column.
__attribute__((target("avx2,fma")))
void avx2_sgemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t n,
                   std::size_t k, bool acc) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        float* c0 = c + (i + 0) * n;
        float* c1 = c + (i + 1) * n;
        float* c2 = c + (i + 2) * n;
        float* c3 = c + (i + 3) * n;
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
            const float* bp = b + j;
            const float* ap = a + i;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n, ap += m) {
                __m256 bv = _mm256_loadu_ps(bp);
                s0 = _mm256_fmadd_ps(_mm256_set1_ps(ap[0]), bv, s0);
                s1 = _mm256_fmadd_ps(_mm256_set1_ps(ap[1]), bv, s1);
                s2 = _mm256_fmadd_ps(_mm256_set1_ps(ap[2]), bv, s2);
                s3 = _mm256_fmadd_ps(_mm256_set1_ps(ap[3]), bv, s3);
            }
            if (acc) {
                s0 = _mm256_add_ps(s0, _mm256_loadu_ps(c0 + j));
                s1 = _mm256_add_ps(s1, _mm256_loadu_ps(c1 + j));
                s2 = _mm256_add_ps(s2, _mm256_loadu_ps(c2 + j));
                s3 = _mm256_add_ps(s3, _mm256_loadu_ps(c3 + j));
            }
            _mm256_storeu_ps(c0 + j, s0);
            _mm256_storeu_ps(c1 + j, s1);
            _mm256_storeu_ps(c2 + j, s2);
            _mm256_storeu_ps(c3 + j, s3);
        }
        for (; j < n; ++j) {
            float s0 = 0.f, s1 = 0.f, s2 = 0.f, s3 = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) {
                float bv = b[kk * n + j];
                s0 += a[kk * m + i + 0] * bv;
                s1 += a[kk * m + i + 1] * bv;
                s2 += a[kk * m + i + 2] * bv;
                s3 += a[kk * m + i + 3] * bv;
            }
            c0[j] = acc ? c0[j] + s0 : s0;
            c1[j] = acc ? c1[j] + s1 : s1;
            c2[j] = acc ? c2[j] + s2 : s2;
            c3[j] = acc ? c3[j] + s3 : s3;
        }
    }
    for (; i < m; ++i) {
        float* ci = c + i * n;
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256 s = _mm256_setzero_ps();
            for (std::size_t kk = 0; kk < k; ++kk)
                s = _mm256_fmadd_ps(_mm256_set1_ps(a[kk * m + i]),
                                    _mm256_loadu_ps(b + kk * n + j), s);
            if (acc) s = _mm256_add_ps(s, _mm256_loadu_ps(ci + j));
            _mm256_storeu_ps(ci + j, s);
        }
        for (; j < n; ++j) {
            float s = 0.f;
            for (std::size_t kk = 0; kk < k; ++kk) s += a[kk * m + i] * b[kk * n + j];
            ci[j] = acc ? ci[j] + s : s;
        }
    }
}

__attribute__((target("avx2")))
void avx2_relu_fwd(const float* x, float* y, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : 0.f;
}

__attribute__((target("avx2")))
void avx2_relu_bwd(const float* x, const float* dy, float* dx, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
        __m256 g = _mm256_and_ps(_mm256_loadu_ps(dy + i), mask);
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : 0.f;
}

__attribute__((target("avx2")))
void avx2_lrelu_fwd(const float* x, float* y, std::size_t n, float slope) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 sl = _mm256_set1_ps(slope);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(x + i);
        __m256 neg = _mm256_mul_ps(sl, v);
        __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, v, mask));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : slope * x[i];
}

__attribute__((target("avx2")))
void avx2_lrelu_bwd(const float* x, const float* dy, float* dx, std::size_t n, float slope) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 sl = _mm256_set1_ps(slope);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 g = _mm256_loadu_ps(dy + i);
        __m256 neg = _mm256_mul_ps(sl, g);
        __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
        __m256 d = _mm256_blendv_ps(neg, g, mask);
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), d));
    }
    for (; i < n; ++i) dx[i] += x[i] > 0.f ? dy[i] : slope * dy[i];
}

__attribute__((target("avx2")))
void avx2_axpy(float a, const float* x, float* y, std::size_t n) {
    const __m256 av = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 t = _mm256_mul_ps(av, _mm256_loadu_ps(x + i));
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), t));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2")))
void avx2_affine(float a, float b, const float* x, float* y, std::size_t n) {
    const __m256 av = _mm256_set1_ps(a);
    const __m256 bv = _mm256_set1_ps(b);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_mul_ps(av, _mm256_loadu_ps(x + i)), bv));
    for (; i < n; ++i) y[i] = a * x[i] + b;
}

__attribute__((target("avx2")))
void avx2_adam(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
               float beta1, float beta2, float eps, float bias1, float bias2) {
    const __m256 b1 = _mm256_set1_ps(beta1), ob1 = _mm256_set1_ps(1.f - beta1);
    const __m256 b2 = _mm256_set1_ps(beta2), ob2 = _mm256_set1_ps(1.f - beta2);
    const __m256 c1 = _mm256_set1_ps(bias1), c2 = _mm256_set1_ps(bias2);
    const __m256 lrv = _mm256_set1_ps(lr), epsv = _mm256_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 gv = _mm256_loadu_ps(g + i);
        __m256 mv = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)),
                                  _mm256_mul_ps(ob1, gv));
        __m256 vv = _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)),
                                  _mm256_mul_ps(_mm256_mul_ps(ob2, gv), gv));
        _mm256_storeu_ps(m + i, mv);
        _mm256_storeu_ps(v + i, vv);
        __m256 mhat = _mm256_div_ps(mv, c1);
        __m256 vhat = _mm256_div_ps(vv, c2);
        __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), epsv);
        __m256 step = _mm256_div_ps(_mm256_mul_ps(lrv, mhat), denom);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.f - beta2) * g[i] * g[i];
        float mhat = m[i] / bias1;
        float vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

constexpr Kernels kAvx2 = {
    avx2_sgemm, avx2_sgemm_nt, avx2_sgemm_tn, avx2_relu_fwd, avx2_relu_bwd,
    avx2_lrelu_fwd, avx2_lrelu_bwd, avx2_axpy, avx2_affine, avx2_adam,
};

}  // namespace

const Kernels& avx2_table() { return kAvx2; }

}  // namespace mimic::core::kernels

#endif  // x86
