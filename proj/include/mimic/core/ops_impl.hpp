#pragma once

// Implementation of ops.hpp; included at the bottom of that header.

#include "mimic/core/tape.hpp"
#include "mimic/core/tensor.hpp"
#include <cmath>
#include <cstring>

#include "mimic/core/kernels.hpp"

namespace mimic::core {

namespace opdetail {

template <class T>
using KD = kernels::dispatch<T>;

template <class T>
void check_4d(const TensorT<T>& x, const char* what) {
    if (x.rank() != 4) throw ShapeError(std::string(what) + " must be 4-d, got " +
                                        shape_str(x.shape()));
}

template <class T>
TensorT<T> make_output(Shape shape, bool needs_grad) {
    TensorT<T> y = TensorT<T>::zeros(std::move(shape));
    if (needs_grad) y.set_requires_grad(true);
    return y;
}

// out[n,f,ho,wo] (+)= conv(x[n,c,h,w], wmat[F,CK]) + bias. Shared by conv2d
// forward (acc=false, fresh output) and conv2d_transpose backward-input
// (acc=true, accumulating into an existing gradient buffer).
template <class T>
void conv_forward_into(const T* x, int n, int c, int h, int wd, const T* wmat,
                       std::span<const T> bias, int stride, int pad, int f, int kh, int kw,
                       T* out, int ho, int wo, bool acc) {
    const std::size_t ck = static_cast<std::size_t>(c) * kh * kw;
    const std::size_t plane = static_cast<std::size_t>(ho) * wo;
    std::vector<T> cols(ck * plane);
    for (int ni = 0; ni < n; ++ni) {
        const T* img = x + static_cast<std::size_t>(ni) * c * h * wd;
        kernels::im2col(img, c, h, wd, kh, kw, stride, pad, ho, wo, cols.data());
        T* dst = out + static_cast<std::size_t>(ni) * f * plane;
        opdetail::KD<T>::gemm(wmat, cols.data(), dst, f, plane, ck, acc);
        if (!bias.empty())
            for (int fi = 0; fi < f; ++fi) {
                T bv = bias[fi];
                T* row = dst + static_cast<std::size_t>(fi) * plane;
                for (std::size_t p = 0; p < plane; ++p) row[p] += bv;
            }
    }
}

// Adjoint map shared by conv2d backward-input and conv2d_transpose forward:
// scatter wmat^T x t through col2im. Always accumulates into `out`, so the
// caller provides a zeroed buffer for a forward pass or a gradient buffer.
// t:[n,f,h,w]; out:[n,c,ho2,wo2]; wmat is [f, c*kh*kw].
template <class T>
void conv_adjoint_into(const T* t, int n, int f, int h, int w, const T* wmat, int c, int kh,
                       int kw, int stride, int pad, int ho2, int wo2, T* out,
                       std::span<const T> bias) {
    const std::size_t ck = static_cast<std::size_t>(c) * kh * kw;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::vector<T> cols(ck * plane);
    for (int ni = 0; ni < n; ++ni) {
        const T* src = t + static_cast<std::size_t>(ni) * f * plane;
        opdetail::KD<T>::gemm_tn(wmat, src, cols.data(), ck, plane, f, false);
        T* img = out + static_cast<std::size_t>(ni) * c * ho2 * wo2;
        if (!bias.empty())
            for (int ci = 0; ci < c; ++ci) {
                T bv = bias[ci];
                T* row = img + static_cast<std::size_t>(ci) * ho2 * wo2;
                for (int p = 0; p < ho2 * wo2; ++p) row[p] += bv;
            }
        kernels::col2im(cols.data(), c, ho2, wo2, kh, kw, stride, pad, h, w, img);
    }
}

// dW[F,CK] += dy[N,F,plane] x im2col(x)^T, one gemm per image.
template <class T>
void conv_weight_grad(const T* x, int n, int c, int h, int wd, const T* dy, int f, int kh,
                      int kw, int stride, int pad, int ho, int wo, T* dw) {
    const std::size_t ck = static_cast<std::size_t>(c) * kh * kw;
    const std::size_t plane = static_cast<std::size_t>(ho) * wo;
    std::vector<T> cols(ck * plane);
    for (int ni = 0; ni < n; ++ni) {
        const T* img = x + static_cast<std::size_t>(ni) * c * h * wd;
        kernels::im2col(img, c, h, wd, kh, kw, stride, pad, ho, wo, cols.data());
        opdetail::KD<T>::gemm_nt(dy + static_cast<std::size_t>(ni) * f * plane, cols.data(),
                                 dw, f, ck, plane, true);
    }
}

template <class T>
void bias_grad(const T* dy, int n, int f, std::size_t plane, T* db) {
    for (int ni = 0; ni < n; ++ni)
        for (int fi = 0; fi < f; ++fi) {
            const T* row = dy + (static_cast<std::size_t>(ni) * f + fi) * plane;
            T s = T(0);
            for (std::size_t p = 0; p < plane; ++p) s += row[p];
            db[fi] += s;
        }
}

}  // namespace opdetail

template <class T>
TensorT<T> conv2d(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                  const TensorT<T>& b, int stride, int pad) {
    opdetail::check_4d(x, "conv2d input");
    opdetail::check_4d(w, "conv2d kernel");
    if (stride < 1) throw ShapeError("conv2d stride must be >= 1");
    const int c = x.dim(1), h = x.dim(2), wd = x.dim(3);
    const int f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(1) != c)
        throw ShapeError("conv2d kernel channels " + std::to_string(w.dim(1)) +
                         " != input channels " + std::to_string(c));
    if (kh > h + 2 * pad || kw > wd + 2 * pad)
        throw ShapeError("conv2d kernel larger than padded input");
    if (b.numel() != static_cast<std::size_t>(f))
        throw ShapeError("conv2d bias length != kernel count");
    const int ho = conv_out_dim(h, kh, stride, pad), wo = conv_out_dim(wd, kw, stride, pad);

    bool needs = x.requires_grad() || w.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({x.dim(0), f, ho, wo}, needs);
    opdetail::conv_forward_into(x.data().data(), x.dim(0), c, h, wd, w.data().data(), b.data(), stride,
                      pad, f, kh, kw, y.data().data(), ho, wo, false);

    if (needs) {
        tape.record([x = x, w = w, b = b, y, stride, pad, f, kh, kw, ho, wo]() mutable {
            const int n = x.dim(0), c2 = x.dim(1), h2 = x.dim(2), w2 = x.dim(3);
            const std::size_t plane = static_cast<std::size_t>(ho) * wo;
            const T* dy = y.grad().data();
            if (w.requires_grad())
                opdetail::conv_weight_grad(x.data().data(), n, c2, h2, w2, dy, f, kh, kw, stride, pad,
                                 ho, wo, w.grad().data());
            if (b.requires_grad()) opdetail::bias_grad(dy, n, f, plane, b.grad().data());
            if (x.requires_grad())
                opdetail::conv_adjoint_into(dy, n, f, ho, wo, w.data().data(), c2, kh, kw, stride, pad,
                                  h2, w2, x.grad().data(), {});
        });
    }
    return y;
}

template <class T>
TensorT<T> conv2d_transpose(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                            const TensorT<T>& b, int stride, int pad) {
    opdetail::check_4d(x, "conv2d_transpose input");
    opdetail::check_4d(w, "conv2d_transpose kernel");
    if (stride < 1) throw ShapeError("conv2d_transpose stride must be >= 1");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
    const int f = w.dim(1), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(0) != c)
        throw ShapeError("conv2d_transpose kernel in-channels " + std::to_string(w.dim(0)) +
                         " != input channels " + std::to_string(c));
    if (b.numel() != static_cast<std::size_t>(f))
        throw ShapeError("conv2d_transpose bias length != out channels");
    const int ho = convt_out_dim(h, kh, stride, pad), wo = convt_out_dim(wd, kw, stride, pad);
    if (ho <= 0 || wo <= 0) throw ShapeError("conv2d_transpose output would be empty");

    bool needs = x.requires_grad() || w.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({n, f, ho, wo}, needs);
    opdetail::conv_adjoint_into(x.data().data(), n, c, h, wd, w.data().data(), f, kh, kw, stride, pad,
                      ho, wo, y.data().data(), b.data());

    if (needs) {
        tape.record([x = x, w = w, b = b, y, stride, pad, f, kh, kw, ho, wo]() mutable {
            const int n2 = x.dim(0), c2 = x.dim(1), h2 = x.dim(2), w2 = x.dim(3);
            const T* dy = y.grad().data();
            if (b.requires_grad())
                opdetail::bias_grad(dy, n2, f, static_cast<std::size_t>(ho) * wo, b.grad().data());
            if (x.requires_grad())
                // dx = conv2d(dy, w) with w's native [C, F*kh*kw] layout.
                opdetail::conv_forward_into(dy, n2, f, ho, wo, w.data().data(), {}, stride, pad, c2,
                                  kh, kw, x.grad().data(), h2, w2, true);
            if (w.requires_grad())
                // dW[C,FK] += x_img[C,plane] x im2col(dy)^T, per image.
                opdetail::conv_weight_grad(dy, n2, f, ho, wo, x.data().data(), c2, kh, kw, stride, pad,
                                 h2, w2, w.grad().data());
        });
    }
    return y;
}

template <class T>
TensorT<T> linear(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                  const TensorT<T>& b) {
    if (x.rank() != 2 || w.rank() != 2)
        throw ShapeError("linear expects 2-d input and weight");
    const int n = x.dim(0), d = x.dim(1), k = w.dim(1);
    if (w.dim(0) != d)
        throw ShapeError("linear inner dims disagree: input " + shape_str(x.shape()) +
                         " weight " + shape_str(w.shape()));
    if (b.numel() != static_cast<std::size_t>(k)) throw ShapeError("linear bias length != K");

    bool needs = x.requires_grad() || w.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({n, k}, needs);
    opdetail::KD<T>::gemm(x.data().data(), w.data().data(), y.data().data(), n, k, d, false);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) y.data()[static_cast<std::size_t>(i) * k + j] += b.data()[j];

    if (needs) {
        tape.record([x = x, w = w, b = b, y, n, d, k]() mutable {
            const T* dy = y.grad().data();
            if (x.requires_grad())
                opdetail::KD<T>::gemm_nt(dy, w.data().data(), x.grad().data(), n, d, k, true);
            if (w.requires_grad())
                opdetail::KD<T>::gemm_tn(x.data().data(), dy, w.grad().data(), d, k, n, true);
            if (b.requires_grad()) {
                T* db = b.grad().data();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < k; ++j) db[j] += dy[static_cast<std::size_t>(i) * k + j];
            }
        });
    }
    return y;
}

template <class T>
TensorT<T> relu(TapeT<T>& tape, const TensorT<T>& x) {
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    opdetail::KD<T>::relu_fwd(x.data().data(), y.data().data(), x.numel());
    if (x.requires_grad())
        tape.record([x = x, y]() mutable {
            opdetail::KD<T>::relu_bwd(x.data().data(), y.grad().data(), x.grad().data(), x.numel());
        });
    return y;
}

template <class T>
TensorT<T> leaky_relu(TapeT<T>& tape, const TensorT<T>& x, T slope) {
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    opdetail::KD<T>::lrelu_fwd(x.data().data(), y.data().data(), x.numel(), slope);
    if (x.requires_grad())
        tape.record([x = x, y, slope]() mutable {
            opdetail::KD<T>::lrelu_bwd(x.data().data(), y.grad().data(), x.grad().data(), x.numel(),
                             slope);
        });
    return y;
}

template <class T>
TensorT<T> tanh_act(TapeT<T>& tape, const TensorT<T>& x) {
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    for (std::size_t i = 0; i < x.numel(); ++i) y.data()[i] = std::tanh(x.data()[i]);
    if (x.requires_grad())
        tape.record([x = x, y]() mutable {
            auto dy = y.grad();
            auto yv = y.data();
            auto dx = x.grad();
            for (std::size_t i = 0; i < dx.size(); ++i)
                dx[i] += dy[i] * (T(1) - yv[i] * yv[i]);
        });
    return y;
}

template <class T>
TensorT<T> sigmoid_act(TapeT<T>& tape, const TensorT<T>& x) {
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    for (std::size_t i = 0; i < x.numel(); ++i)
        y.data()[i] = T(1) / (T(1) + std::exp(-x.data()[i]));
    if (x.requires_grad())
        tape.record([x = x, y]() mutable {
            auto dy = y.grad();
            auto yv = y.data();
            auto dx = x.grad();
            for (std::size_t i = 0; i < dx.size(); ++i)
                dx[i] += dy[i] * yv[i] * (T(1) - yv[i]);
        });
    return y;
}

template <class T>
TensorT<T> instance_norm(TapeT<T>& tape, const TensorT<T>& x, T eps) {
    opdetail::check_4d(x, "instance_norm input");
    const int n = x.dim(0), c = x.dim(1);
    const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    // inv_sigma per (n,c) group is needed again in backward.
    auto inv_sigma = std::make_shared<std::vector<T>>(static_cast<std::size_t>(n) * c);

    for (int g = 0; g < n * c; ++g) {
        const T* src = x.data().data() + static_cast<std::size_t>(g) * plane;
        T* dst = y.data().data() + static_cast<std::size_t>(g) * plane;
        T mu = T(0);
        for (std::size_t p = 0; p < plane; ++p) mu += src[p];
        mu /= static_cast<T>(plane);
        T var = T(0);
        for (std::size_t p = 0; p < plane; ++p) {
            T d = src[p] - mu;
            var += d * d;
        }
        var /= static_cast<T>(plane);
        T inv = T(1) / std::sqrt(var + eps);
        (*inv_sigma)[static_cast<std::size_t>(g)] = inv;
        for (std::size_t p = 0; p < plane; ++p) dst[p] = (src[p] - mu) * inv;
    }

    if (x.requires_grad())
        tape.record([x = x, y, inv_sigma, n, c, plane]() mutable {
            const T m = static_cast<T>(plane);
            for (int g = 0; g < n * c; ++g) {
                const T* xhat = y.data().data() + static_cast<std::size_t>(g) * plane;
                const T* dy = y.grad().data() + static_cast<std::size_t>(g) * plane;
                T* dx = x.grad().data() + static_cast<std::size_t>(g) * plane;
                T inv = (*inv_sigma)[static_cast<std::size_t>(g)];
                T mean_dy = T(0), mean_dyxhat = T(0);
                for (std::size_t p = 0; p < plane; ++p) {
                    mean_dy += dy[p];
                    mean_dyxhat += dy[p] * xhat[p];
                }
                mean_dy /= m;
                mean_dyxhat /= m;
                for (std::size_t p = 0; p < plane; ++p)
                    dx[p] += inv * (dy[p] - mean_dy - xhat[p] * mean_dyxhat);
            }
        });
    return y;
}

template <class T>
TensorT<T> concat_channels(TapeT<T>& tape, const std::vector<TensorT<T>>& xs) {
    if (xs.empty()) throw ShapeError("concat_channels needs at least one input");
    opdetail::check_4d(xs[0], "concat input");
    const int n = xs[0].dim(0), h = xs[0].dim(2), w = xs[0].dim(3);
    int ctot = 0;
    bool needs = false;
    for (const auto& x : xs) {
        opdetail::check_4d(x, "concat input");
        if (x.dim(0) != n || x.dim(2) != h || x.dim(3) != w)
            throw ShapeError("concat_channels inputs disagree: " + shape_str(xs[0].shape()) +
                             " vs " + shape_str(x.shape()));
        ctot += x.dim(1);
        needs = needs || x.requires_grad();
    }
    TensorT<T> y = opdetail::make_output<T>({n, ctot, h, w}, needs);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::size_t coff = 0;
    for (const auto& x : xs) {
        const std::size_t cc = static_cast<std::size_t>(x.dim(1));
        for (int ni = 0; ni < n; ++ni)
            std::memcpy(y.data().data() + (ni * ctot + coff) * plane,
                        x.data().data() + ni * cc * plane, cc * plane * sizeof(T));
        coff += cc;
    }
    if (needs)
        tape.record([xs = xs, y, n, ctot, plane]() mutable {
            std::size_t coff2 = 0;
            for (auto& x : xs) {
                const std::size_t cc = static_cast<std::size_t>(x.dim(1));
                if (x.requires_grad())
                    for (int ni = 0; ni < n; ++ni) {
                        const T* src = y.grad().data() + (ni * ctot + coff2) * plane;
                        T* dst = x.grad().data() + ni * cc * plane;
                        for (std::size_t i = 0; i < cc * plane; ++i) dst[i] += src[i];
                    }
                coff2 += cc;
            }
        });
    return y;
}

template <class T>
TensorT<T> affine_map(TapeT<T>& tape, const TensorT<T>& x, T scale, T shift) {
    TensorT<T> y = opdetail::make_output<T>(x.shape(), x.requires_grad());
    opdetail::KD<T>::affine(scale, shift, x.data().data(), y.data().data(), x.numel());
    if (x.requires_grad())
        tape.record([x = x, y, scale]() mutable {
            opdetail::KD<T>::axpy(scale, y.grad().data(), x.grad().data(), x.numel());
        });
    return y;
}

namespace opdetail {

template <class T>
void check_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* what) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(what) + " shape mismatch: " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
}

}  // namespace opdetail

template <class T>
TensorT<T> l1_loss(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b) {
    opdetail::check_same_shape(a, b, "l1_loss");
    const std::size_t n = a.numel();
    T s = T(0);
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a.data()[i] - b.data()[i]);
    bool needs = a.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({1}, needs);
    y.data()[0] = s / static_cast<T>(n);
    if (needs)
        tape.record([a = a, b = b, y, n]() mutable {
            const T g = y.grad()[0] / static_cast<T>(n);
            for (std::size_t i = 0; i < n; ++i) {
                T d = a.data()[i] - b.data()[i];
                T sg = d > T(0) ? g : (d < T(0) ? -g : T(0));
                if (a.requires_grad()) a.grad()[i] += sg;
                if (b.requires_grad()) b.grad()[i] -= sg;
            }
        });
    return y;
}

template <class T>
TensorT<T> l2_loss(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b) {
    opdetail::check_same_shape(a, b, "l2_loss");
    const std::size_t n = a.numel();
    T s = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        T d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    bool needs = a.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({1}, needs);
    y.data()[0] = s / static_cast<T>(n);
    if (needs)
        tape.record([a = a, b = b, y, n]() mutable {
            const T g = T(2) * y.grad()[0] / static_cast<T>(n);
            for (std::size_t i = 0; i < n; ++i) {
                T d = g * (a.data()[i] - b.data()[i]);
                if (a.requires_grad()) a.grad()[i] += d;
                if (b.requires_grad()) b.grad()[i] -= d;
            }
        });
    return y;
}

template <class T>
TensorT<T> bce_loss(TapeT<T>& tape, const TensorT<T>& p, const TensorT<T>& target) {
    opdetail::check_same_shape(p, target, "bce_loss");
    const T lo = T(1e-7), hi = T(1) - T(1e-7);
    const std::size_t n = p.numel();
    T s = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        T pc = std::min(hi, std::max(lo, p.data()[i]));
        T t = target.data()[i];
        s += -(t * std::log(pc) + (T(1) - t) * std::log(T(1) - pc));
    }
    bool needs = p.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({1}, needs);
    y.data()[0] = s / static_cast<T>(n);
    if (needs)
        tape.record([p = p, target = target, y, n, lo, hi]() mutable {
            const T g = y.grad()[0] / static_cast<T>(n);
            for (std::size_t i = 0; i < n; ++i) {
                T pc = std::min(hi, std::max(lo, p.data()[i]));
                T t = target.data()[i];
                p.grad()[i] += g * (pc - t) / (pc * (T(1) - pc));
            }
        });
    return y;
}

template <class T>
TensorT<T> bce_loss(TapeT<T>& tape, const TensorT<T>& p, T label) {
    return bce_loss(tape, p, TensorT<T>::full(p.shape(), label));
}

template <class T>
TensorT<T> sum_all(TapeT<T>& tape, const TensorT<T>& x) {
    T s = T(0);
    for (T v : x.data()) s += v;
    bool needs = x.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({1}, needs);
    y.data()[0] = s;
    if (needs)
        tape.record([x = x, y]() mutable {
            const T g = y.grad()[0];
            for (auto& d : x.grad()) d += g;
        });
    return y;
}

template <class T>
TensorT<T> mean_all(TapeT<T>& tape, const TensorT<T>& x) {
    T s = T(0);
    for (T v : x.data()) s += v;
    bool needs = x.requires_grad();
    TensorT<T> y = opdetail::make_output<T>({1}, needs);
    y.data()[0] = s / static_cast<T>(x.numel());
    if (needs)
        tape.record([x = x, y]() mutable {
            const T g = y.grad()[0] / static_cast<T>(x.numel());
            for (auto& d : x.grad()) d += g;
        });
    return y;
}

template <class T>
TensorT<T> add(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b, T alpha) {
    opdetail::check_same_shape(a, b, "add");
    bool needs = a.requires_grad() || b.requires_grad();
    TensorT<T> y = opdetail::make_output<T>(a.shape(), needs);
    for (std::size_t i = 0; i < a.numel(); ++i)
        y.data()[i] = a.data()[i] + alpha * b.data()[i];
    if (needs)
        tape.record([a = a, b = b, y, alpha]() mutable {
            if (a.requires_grad()) opdetail::KD<T>::axpy(T(1), y.grad().data(), a.grad().data(), a.numel());
            if (b.requires_grad()) opdetail::KD<T>::axpy(alpha, y.grad().data(), b.grad().data(), b.numel());
        });
    return y;
}

}  // namespace mimic::core
