#include "mimic/core/gradcheck.hpp"

#include "mimic/core/init.hpp"
#include "mimic/core/rng.hpp"

namespace mimic::core {

namespace {

// Random values bounded away from the relu/lrelu kink and the l1 crease, so
// central differences stay on one side of the nondifferentiable point.
template <class T>
TensorT<T> kink_free(Shape shape, Rng& rng) {
    TensorT<T> t = TensorT<T>::zeros(std::move(shape));
    for (auto& v : t.data()) {
        double u = rng.uniform(0.1, 1.0);
        v = static_cast<T>(rng.uniform() < 0.5 ? -u : u);
    }
    return t;
}

template <class T>
std::vector<GradCheckResult> run_suite(std::uint64_t seed, T h) {
    Rng rng(seed);
    std::vector<GradCheckResult> out;
    auto check = [&](const std::string& name,
                     const std::function<TensorT<T>(TapeT<T>&)>& fwd,
                     std::vector<TensorT<T>> wrt) {
        out.push_back({name, max_grad_rel_err<T>(fwd, std::move(wrt), h)});
    };

    // conv2d: 2x3x6x6 input, 4x3x3x3 kernel, stride 2, pad 1
    {
        auto x = kink_free<T>({2, 3, 6, 6}, rng);
        auto w = normal_init<T>({4, 3, 3, 3}, rng, 0.3);
        auto b = normal_init<T>({4}, rng, 0.3);
        auto tgt = kink_free<T>({2, 4, 3, 3}, rng);
        check("conv2d",
              [=](TapeT<T>& t) { return l2_loss(t, conv2d(t, x, w, b, 2, 1), tgt); },
              {x, w, b});
    }
    // conv2d_transpose: 2x3x3x3 input, kernel 3x2x2x2 stride 2
    {
        auto x = kink_free<T>({2, 3, 3, 3}, rng);
        auto w = normal_init<T>({3, 2, 2, 2}, rng, 0.3);
        auto b = normal_init<T>({2}, rng, 0.3);
        auto tgt = kink_free<T>({2, 2, 6, 6}, rng);
        check("conv2d_transpose",
              [=](TapeT<T>& t) { return l2_loss(t, conv2d_transpose(t, x, w, b, 2, 0), tgt); },
              {x, w, b});
    }
    // linear 4x5 -> 3
    {
        auto x = kink_free<T>({4, 5}, rng);
        auto w = normal_init<T>({5, 3}, rng, 0.3);
        auto b = normal_init<T>({3}, rng, 0.3);
        auto tgt = kink_free<T>({4, 3}, rng);
        check("linear", [=](TapeT<T>& t) { return l2_loss(t, linear(t, x, w, b), tgt); },
              {x, w, b});
    }
    // activations
    {
        auto x = kink_free<T>({3, 7}, rng);
        check("relu", [=](TapeT<T>& t) { return sum_all(t, relu(t, x)); }, {x});
        check("leaky_relu",
              [=](TapeT<T>& t) { return sum_all(t, leaky_relu(t, x, T(0.2))); }, {x});
        auto tgt = kink_free<T>({3, 7}, rng);
        check("tanh", [=](TapeT<T>& t) { return l2_loss(t, tanh_act(t, x), tgt); }, {x});
        check("sigmoid", [=](TapeT<T>& t) { return l2_loss(t, sigmoid_act(t, x), tgt); }, {x});
    }
    // instance_norm
    {
        auto x = kink_free<T>({2, 3, 4, 4}, rng);
        auto tgt = kink_free<T>({2, 3, 4, 4}, rng);
        check("instance_norm",
              [=](TapeT<T>& t) { return l2_loss(t, instance_norm(t, x, T(1e-5)), tgt); }, {x});
    }
    // concat + affine
    {
        auto a = kink_free<T>({2, 2, 3, 3}, rng);
        auto b2 = kink_free<T>({2, 3, 3, 3}, rng);
        auto tgt = kink_free<T>({2, 5, 3, 3}, rng);
        check("concat_channels",
              [=](TapeT<T>& t) {
                  return l2_loss(t, concat_channels(t, {a, b2}), tgt);
              },
              {a, b2});
        check("affine_map",
              [=](TapeT<T>& t) {
                  return l2_loss(t, affine_map(t, a, T(0.5), T(0.25)),
                                 TensorT<T>::zeros(a.shape()));
              },
              {a});
    }
    // losses
    {
        auto a = kink_free<T>({4, 4}, rng);
        auto b2 = kink_free<T>({4, 4}, rng);
        check("l1_loss", [=](TapeT<T>& t) { return l1_loss(t, a, b2); }, {a, b2});
        check("l2_loss", [=](TapeT<T>& t) { return l2_loss(t, a, b2); }, {a, b2});
        auto p = uniform_init<T>({6}, rng, 0.1, 0.9);
        auto lbl = TensorT<T>::from({6}, {T(1), T(0), T(1), T(1), T(0), T(0)});
        check("bce_loss", [=](TapeT<T>& t) { return bce_loss(t, p, lbl); }, {p});
    }
    // mean/sum/add
    {
        auto a = kink_free<T>({3, 5}, rng);
        auto b2 = kink_free<T>({3, 5}, rng);
        check("sum_all", [=](TapeT<T>& t) { return sum_all(t, a); }, {a});
        check("mean_all", [=](TapeT<T>& t) { return mean_all(t, a); }, {a});
        check("add",
              [=](TapeT<T>& t) {
                  return l2_loss(t, add(t, a, b2, T(0.7)), TensorT<T>::zeros(a.shape()));
              },
              {a, b2});
    }
    // composite conv -> relu -> linear -> bce chain
    {
        auto x = kink_free<T>({2, 2, 4, 4}, rng);
        auto w1 = normal_init<T>({3, 2, 3, 3}, rng, 0.3);
        auto b1 = normal_init<T>({3}, rng, 0.3);
        auto w2 = normal_init<T>({12, 1}, rng, 0.3);
        auto b2 = normal_init<T>({1}, rng, 0.3);
        check("composite_conv_relu_linear_bce",
              [=](TapeT<T>& t) {
                  auto h1 = relu(t, conv2d(t, x, w1, b1, 2, 1));
                  auto flat = h1.reshape({2, 12});
                  auto logits = linear(t, flat, w2, b2);
                  auto p = sigmoid_act(t, logits);
                  return bce_loss(t, p, T(1));
              },
              {x, w1, b1, w2, b2});
    }
    return out;
}

}  // namespace

std::vector<GradCheckResult> gradcheck_ops_double(std::uint64_t seed) {
    return run_suite<double>(seed, 1e-4);
}

std::vector<GradCheckResult> gradcheck_ops_float(std::uint64_t seed) {
    return run_suite<float>(seed, 1e-2f);
}

}  // namespace mimic::core
