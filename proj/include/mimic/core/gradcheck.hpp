#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mimic/core/ops.hpp"

namespace mimic::core {

struct GradCheckResult {
    std::string name;
    double max_rel_err = 0.0;
};

/// Compare analytic gradients against central finite differences.
/// `forward` rebuilds the same scalar loss on a fresh tape each call, reading
/// the current contents of the `wrt` tensors; the finite-difference side
/// never touches the backward pass it is checking.
template <class T>
double max_grad_rel_err(const std::function<TensorT<T>(TapeT<T>&)>& forward,
                        std::vector<TensorT<T>> wrt, T h) {
    for (auto& t : wrt) {
        t.set_requires_grad(true);
        t.zero_grad();
    }
    TapeT<T> tape;
    TensorT<T> loss = forward(tape);
    tape.backward(loss);

    auto eval = [&]() -> T {
        TapeT<T> scratch;
        return forward(scratch).item();
    };

    double worst = 0.0;
    for (auto& t : wrt) {
        auto xs = t.data();
        auto gs = t.grad();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            T orig = xs[i];
            xs[i] = orig + h;
            T fp = eval();
            xs[i] = orig - h;
            T fm = eval();
            xs[i] = orig;
            double fd = (static_cast<double>(fp) - static_cast<double>(fm)) /
                        (2.0 * static_cast<double>(h));
            double an = static_cast<double>(gs[i]);
            double denom = std::max({1.0, std::abs(an), std::abs(fd)});
            worst = std::max(worst, std::abs(an - fd) / denom);
        }
    }
    return worst;
}

/// Finite-difference sweep over every differentiable op at small sizes.
/// Double precision uses h=1e-4 (bound 1e-5); single uses h=1e-2 (bound 1e-3).
std::vector<GradCheckResult> gradcheck_ops_double(std::uint64_t seed = 7);
std::vector<GradCheckResult> gradcheck_ops_float(std::uint64_t seed = 7);

}  // namespace mimic::core
