#include <cmath>

#include "doctest.h"
#include "mimic/core/adam.hpp"
#include "mimic/core/ops.hpp"

using namespace mimic::core;

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Tensor p = Tensor::from({3}, {1.f, -2.f, 0.5f});
    p.set_requires_grad(true);
    Adam opt({p}, {.lr = 0.1f, .beta1 = 0.9f, .beta2 = 0.999f, .eps = 1e-8f});
    opt.step();
    CHECK(p.data()[0] == 1.f);
    CHECK(p.data()[1] == -2.f);
    CHECK(p.data()[2] == 0.5f);
    CHECK(opt.steps() == 1);
}

TEST_CASE("adam: first step with constant gradient is about lr") {
    Tensor p = Tensor::from({1}, {0.f});
    p.set_requires_grad(true);
    Adam opt({p}, {.lr = 0.1f, .beta1 = 0.9f, .beta2 = 0.999f, .eps = 1e-8f});
    p.grad()[0] = 1.f;
    opt.step();
    // bias-corrected first step: lr * g / (|g| + eps') ~ lr
    CHECK(p.data()[0] == doctest::Approx(-0.1f).epsilon(1e-3));
}

TEST_CASE("adam: 200 steps on (x-3)^2 converges") {
    Tensor x = Tensor::from({1}, {0.f});
    x.set_requires_grad(true);
    Tensor target = Tensor::from({1}, {3.f});
    Adam opt({x}, {.lr = 0.1f, .beta1 = 0.9f, .beta2 = 0.999f, .eps = 1e-8f});
    for (int i = 0; i < 200; ++i) {
        Tape tape;
        Tensor loss = l2_loss(tape, x, target);
        tape.backward(loss);
        opt.step();
    }
    CHECK(std::abs(x.data()[0] - 3.f) < 0.1f);
}

TEST_CASE("adam: gradients cleared after step") {
    Tensor p = Tensor::from({2}, {1.f, 1.f});
    p.set_requires_grad(true);
    Adam opt({p}, {});
    p.grad()[0] = 5.f;
    opt.step();
    CHECK(p.grad()[0] == 0.f);
}
