#pragma once

#include "mimic/core/rng.hpp"
#include "mimic/core/tensor.hpp"

namespace mimic::core {

/// Zero-mean normal init with std 0.02 for convolution and linear weights;
/// biases stay zero.
template <class T>
TensorT<T> normal_init(Shape shape, Rng& rng, double stddev = 0.02) {
    TensorT<T> t = TensorT<T>::zeros(std::move(shape));
    for (auto& v : t.data()) v = static_cast<T>(rng.normal(0.0, stddev));
    return t;
}

template <class T>
TensorT<T> uniform_init(Shape shape, Rng& rng, double lo, double hi) {
    TensorT<T> t = TensorT<T>::zeros(std::move(shape));
    for (auto& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

}  // namespace mimic::core
