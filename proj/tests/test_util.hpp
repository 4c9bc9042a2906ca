#pragma once

// Test-side reference oracles. These stay independent of the library's
// im2col/gemm path: plain nested loops, nothing shared with src/.

#include <cmath>
#include <vector>

#include "mimic/core/rng.hpp"
#include "mimic/core/tensor.hpp"

namespace testutil {

using mimic::core::Rng;
using mimic::core::Tensor;

// Direct 7-loop convolution oracle: x[N,C,H,W], w[F,C,kh,kw], b[F].
inline std::vector<float> conv2d_reference(const std::vector<float>& x, int n, int c, int h,
                                           int w, const std::vector<float>& ker, int f, int kh,
                                           int kw, const std::vector<float>& bias, int stride,
                                           int pad, int ho, int wo) {
    std::vector<float> out(static_cast<std::size_t>(n) * f * ho * wo, 0.f);
    for (int ni = 0; ni < n; ++ni)
        for (int fi = 0; fi < f; ++fi)
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox) {
                    double acc = bias.empty() ? 0.0 : bias[fi];
                    for (int ci = 0; ci < c; ++ci)
                        for (int ky = 0; ky < kh; ++ky)
                            for (int kx = 0; kx < kw; ++kx) {
                                int iy = oy * stride - pad + ky;
                                int ix = ox * stride - pad + kx;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                                acc += static_cast<double>(
                                           x[((static_cast<std::size_t>(ni) * c + ci) * h + iy) * w + ix]) *
                                       ker[((static_cast<std::size_t>(fi) * c + ci) * kh + ky) * kw + kx];
                            }
                    out[((static_cast<std::size_t>(ni) * f + fi) * ho + oy) * wo + ox] =
                        static_cast<float>(acc);
                }
    return out;
}

// Plain matrix product oracle for linear layers, double accumulation.
inline std::vector<float> matmul_reference(const std::vector<float>& a,
                                           const std::vector<float>& b, int m, int k, int n) {
    std::vector<float> out(static_cast<std::size_t>(m) * n, 0.f);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk)
                acc += static_cast<double>(a[static_cast<std::size_t>(i) * k + kk]) *
                       b[static_cast<std::size_t>(kk) * n + j];
            out[static_cast<std::size_t>(i) * n + j] = static_cast<float>(acc);
        }
    return out;
}

inline Tensor random_tensor(mimic::core::Shape shape, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

inline double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

}  // namespace testutil
