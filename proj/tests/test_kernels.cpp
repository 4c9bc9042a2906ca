// Lane equivalence: every SIMD backend must agree with the scalar reference.
// gemm accumulates with FMA, so both lanes are compared against a
// double-precision oracle; the other kernels must match bitwise.

#include <tuple>
#include <vector>

#include "doctest.h"
#include "mimic/core/kernels.hpp"
#include "mimic/core/rng.hpp"

using namespace mimic::core;
namespace kk = mimic::core::kernels;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

std::vector<kk::Backend> simd_lanes() {
    std::vector<kk::Backend> lanes;
    for (auto b : {kk::Backend::avx2, kk::Backend::avx512, kk::Backend::neon})
        if (kk::backend_supported(b)) lanes.push_back(b);
    return lanes;
}

}  // namespace

TEST_CASE("gemm lanes agree with double oracle") {
    Rng rng(41);
    // deliberately awkward sizes to hit every tail path
    const std::tuple<int, int, int> sizes[] = {{1, 1, 1},  {3, 5, 7},   {4, 16, 9},
                                               {5, 17, 33}, {8, 37, 64}, {13, 100, 21}};
    for (auto [m, n, k] : sizes) {
        auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
        auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
        std::vector<double> oracle(static_cast<std::size_t>(m) * n, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int x = 0; x < k; ++x)
                    s += static_cast<double>(a[i * k + x]) * b[x * n + j];
                oracle[i * n + j] = s;
            }
        // the same product laid out for the nt and tn entry points
        std::vector<float> bt(static_cast<std::size_t>(n) * k), at(static_cast<std::size_t>(k) * m);
        for (int x = 0; x < k; ++x)
            for (int j = 0; j < n; ++j) bt[static_cast<std::size_t>(j) * k + x] = b[x * n + j];
        for (int i = 0; i < m; ++i)
            for (int x = 0; x < k; ++x) at[static_cast<std::size_t>(x) * m + i] = a[i * k + x];
        for (bool acc : {false, true}) {
            auto base = random_vec(static_cast<std::size_t>(m) * n, rng);
            auto check = [&](const std::vector<float>& c) {
                for (int i = 0; i < m * n; ++i) {
                    double want = oracle[i] + (acc ? base[i] : 0.0);
                    CHECK(std::abs(c[i] - want) <= 1e-4 * std::max(1.0, std::abs(want)));
                }
            };
            auto fresh = [&]() { return acc ? base : std::vector<float>(m * n, 0.f); };
            auto lanes = simd_lanes();
            lanes.insert(lanes.begin(), kk::Backend::scalar);
            for (auto lane : lanes) {
                const auto& t = kk::table(lane);
                auto c = fresh();
                t.sgemm(a.data(), b.data(), c.data(), m, n, k, acc);
                check(c);
                c = fresh();
                t.sgemm_nt(a.data(), bt.data(), c.data(), m, n, k, acc);
                check(c);
                c = fresh();
                t.sgemm_tn(at.data(), b.data(), c.data(), m, n, k, acc);
                check(c);
            }
        }
    }
}

TEST_CASE("elementwise and adam lanes match scalar bitwise") {
    Rng rng(43);
    const auto& ref = kk::table(kk::Backend::scalar);
    for (std::size_t n : {1, 7, 8, 9, 15, 16, 17, 64, 100, 257}) {
        auto x = random_vec(n, rng);
        auto dy = random_vec(n, rng);
        for (auto lane : simd_lanes()) {
            const auto& t = kk::table(lane);
            INFO(kk::backend_name(lane) << " n=" << n);

            std::vector<float> y0(n), y1(n);
            ref.relu_fwd(x.data(), y0.data(), n);
            t.relu_fwd(x.data(), y1.data(), n);
            CHECK(y0 == y1);

            ref.lrelu_fwd(x.data(), y0.data(), n, 0.2f);
            t.lrelu_fwd(x.data(), y1.data(), n, 0.2f);
            CHECK(y0 == y1);

            auto d0 = random_vec(n, rng);
            auto d1 = d0;
            ref.relu_bwd(x.data(), dy.data(), d0.data(), n);
            t.relu_bwd(x.data(), dy.data(), d1.data(), n);
            CHECK(d0 == d1);

            d0 = random_vec(n, rng);
            d1 = d0;
            ref.lrelu_bwd(x.data(), dy.data(), d0.data(), n, 0.2f);
            t.lrelu_bwd(x.data(), dy.data(), d1.data(), n, 0.2f);
            CHECK(d0 == d1);

            auto a0 = random_vec(n, rng);
            auto a1 = a0;
            ref.axpy(0.37f, x.data(), a0.data(), n);
            t.axpy(0.37f, x.data(), a1.data(), n);
            CHECK(a0 == a1);

            ref.affine(1.1f, -0.3f, x.data(), y0.data(), n);
            t.affine(1.1f, -0.3f, x.data(), y1.data(), n);
            CHECK(y0 == y1);

            auto p0 = random_vec(n, rng), g = random_vec(n, rng);
            auto m0 = random_vec(n, rng, 0.0, 0.1), v0 = random_vec(n, rng, 0.0, 0.1);
            auto p1 = p0, m1 = m0, v1 = v0;
            ref.adam(p0.data(), g.data(), m0.data(), v0.data(), n, 1e-3f, 0.9f, 0.999f,
                     1e-8f, 0.1f, 0.001f);
            t.adam(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3f, 0.9f, 0.999f,
                   1e-8f, 0.1f, 0.001f);
            CHECK(p0 == p1);
            CHECK(m0 == m1);
            CHECK(v0 == v1);
        }
    }
}

TEST_CASE("im2col/col2im adjoint identity") {
    Rng rng(47);
    const int c = 3, h = 6, w = 5, kh = 3, kw = 2, stride = 2, pad = 1;
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (w + 2 * pad - kw) / stride + 1;
    const std::size_t ck = static_cast<std::size_t>(c) * kh * kw;
    const std::size_t plane = static_cast<std::size_t>(ho) * wo;

    auto img = random_vec(static_cast<std::size_t>(c) * h * w, rng);
    auto v = random_vec(ck * plane, rng);

    std::vector<float> cols(ck * plane);
    kk::im2col(img.data(), c, h, w, kh, kw, stride, pad, ho, wo, cols.data());
    std::vector<float> back(static_cast<std::size_t>(c) * h * w, 0.f);
    kk::col2im(v.data(), c, h, w, kh, kw, stride, pad, ho, wo, back.data());

    // <im2col(img), v> == <img, col2im(v)>
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) lhs += static_cast<double>(cols[i]) * v[i];
    for (std::size_t i = 0; i < img.size(); ++i) rhs += static_cast<double>(img[i]) * back[i];
    CHECK(std::abs(lhs - rhs) < 1e-3 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("backend dispatch is sane") {
    CHECK(kk::backend_supported(kk::Backend::scalar));
    auto saved = kk::active_backend();
    kk::set_backend(kk::Backend::scalar);
    CHECK(kk::active_backend() == kk::Backend::scalar);
    kk::set_backend(saved);
}
