#pragma once

#include <span>
#include <vector>

#include "mimic/core/tape.hpp"
#include "mimic/core/tensor.hpp"

namespace mimic::core {

inline int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}
inline int convt_out_dim(int in, int k, int stride, int pad) {
    return (in - 1) * stride - 2 * pad + k;
}

// x:[N,C,H,W]  w:[F,C,kh,kw]  b:[F]  ->  [N,F,H',W']
template <class T>
TensorT<T> conv2d(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                  const TensorT<T>& b, int stride, int pad);

// x:[N,C,H,W]  w:[C,F,kh,kw]  b:[F]  ->  [N,F,H'',W'']; forward equals the
// input-gradient pass of conv2d with the same kernel/stride/pad.
template <class T>
TensorT<T> conv2d_transpose(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                            const TensorT<T>& b, int stride, int pad);

// x:[N,D]  w:[D,K]  b:[K]  ->  [N,K]
template <class T>
TensorT<T> linear(TapeT<T>& tape, const TensorT<T>& x, const TensorT<T>& w,
                  const TensorT<T>& b);

template <class T> TensorT<T> relu(TapeT<T>& tape, const TensorT<T>& x);
template <class T> TensorT<T> leaky_relu(TapeT<T>& tape, const TensorT<T>& x, T slope);
template <class T> TensorT<T> tanh_act(TapeT<T>& tape, const TensorT<T>& x);
template <class T> TensorT<T> sigmoid_act(TapeT<T>& tape, const TensorT<T>& x);

enum class Activation { relu, leaky_relu, tanh, sigmoid };

template <class T>
TensorT<T> activation(TapeT<T>& tape, Activation kind, const TensorT<T>& x) {
    switch (kind) {
        case Activation::relu: return relu(tape, x);
        case Activation::leaky_relu: return leaky_relu(tape, x, T(0.2));
        case Activation::tanh: return tanh_act(tape, x);
        case Activation::sigmoid: return sigmoid_act(tape, x);
    }
    throw ShapeError("unknown activation");
}

// Per-sample, per-channel normalization over the spatial plane; no affine
// parameters. x:[N,C,H,W].
template <class T>
TensorT<T> instance_norm(TapeT<T>& tape, const TensorT<T>& x, T eps = T(1e-5));

// Concatenate along the channel axis; all inputs [N,Ci,H,W].
template <class T>
TensorT<T> concat_channels(TapeT<T>& tape, const std::vector<TensorT<T>>& xs);

// y = scale * x + shift, elementwise with scalar constants.
template <class T>
TensorT<T> affine_map(TapeT<T>& tape, const TensorT<T>& x, T scale, T shift);

// Mean-reduced losses; scalar outputs.
template <class T> TensorT<T> l1_loss(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b);
template <class T> TensorT<T> l2_loss(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b);

// Binary cross-entropy with probabilities clamped to [1e-7, 1-1e-7].
template <class T>
TensorT<T> bce_loss(TapeT<T>& tape, const TensorT<T>& p, const TensorT<T>& target);
template <class T>
TensorT<T> bce_loss(TapeT<T>& tape, const TensorT<T>& p, T label);

template <class T> TensorT<T> sum_all(TapeT<T>& tape, const TensorT<T>& x);
template <class T> TensorT<T> mean_all(TapeT<T>& tape, const TensorT<T>& x);

// a + b elementwise (matching shapes) and scalar-weighted sum a + alpha*b.
template <class T>
TensorT<T> add(TapeT<T>& tape, const TensorT<T>& a, const TensorT<T>& b, T alpha = T(1));

}  // namespace mimic::core

#include "mimic/core/ops_impl.hpp"
