#include <cmath>
#include <tuple>

#include "doctest.h"
#include "mimic/core/ops.hpp"
#include "mimic/core/rng.hpp"
#include "test_util.hpp"

using namespace mimic::core;
using testutil::random_tensor;

TEST_CASE("tensor invariants") {
    Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.numel() == 6);
    CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros({0, 3}), ShapeError);

    Tensor v = t.reshape({3, 2});
    CHECK(v.same_storage(t));
    v.data()[0] = 42.f;
    CHECK(t.data()[0] == 42.f);
    CHECK_THROWS_AS(t.reshape({4, 2}), ShapeError);

    Tensor d = t.detach();
    CHECK_FALSE(d.same_storage(t));
    CHECK(d.data()[0] == 42.f);
}

TEST_CASE("conv2d identity kernel") {
    Tape tape;
    Tensor x = Tensor::full({1, 1, 3, 3}, 1.f);
    Tensor w = Tensor::from({1, 1, 1, 1}, {1.f});
    Tensor b = Tensor::zeros({1});
    Tensor y = conv2d(tape, x, w, b, 1, 0);
    CHECK(y.shape() == Shape{1, 1, 3, 3});
    for (float v : y.data()) CHECK(v == doctest::Approx(1.f));
}

TEST_CASE("conv2d sum kernel") {
    Tape tape;
    Tensor x = Tensor::from({1, 1, 2, 2}, {1, 2, 3, 4});
    Tensor w = Tensor::full({1, 1, 2, 2}, 1.f);
    Tensor b = Tensor::zeros({1});
    Tensor y = conv2d(tape, x, w, b, 1, 0);
    CHECK(y.shape() == Shape{1, 1, 1, 1});
    CHECK(y.item() == doctest::Approx(10.f));
}

TEST_CASE("conv2d random vs loop-nest oracle") {
    Rng rng(11);
    Tensor x = random_tensor({2, 3, 8, 8}, rng);
    Tensor w = random_tensor({4, 3, 3, 3}, rng);
    Tensor b = random_tensor({4}, rng);
    Tape tape;
    Tensor y = conv2d(tape, x, w, b, 2, 1);
    CHECK(y.shape() == Shape{2, 4, 4, 4});
    auto ref = testutil::conv2d_reference(
        {x.data().begin(), x.data().end()}, 2, 3, 8, 8, {w.data().begin(), w.data().end()},
        4, 3, 3, {b.data().begin(), b.data().end()}, 2, 1, 4, 4);
    CHECK(testutil::max_abs_diff(y.data(), ref) < 1e-4);
}

TEST_CASE("conv2d channel mismatch rejected") {
    Tape tape;
    Tensor x = Tensor::zeros({1, 3, 4, 4});
    Tensor w = Tensor::zeros({2, 4, 3, 3});
    Tensor b = Tensor::zeros({2});
    CHECK_THROWS_AS(conv2d(tape, x, w, b, 1, 1), ShapeError);
}

TEST_CASE("conv2d_transpose scalar broadcast") {
    Tape tape;
    Tensor x = Tensor::from({1, 1, 1, 1}, {5.f});
    Tensor w = Tensor::full({1, 1, 2, 2}, 1.f);
    Tensor b = Tensor::zeros({1});
    Tensor y = conv2d_transpose(tape, x, w, b, 1, 0);
    CHECK(y.shape() == Shape{1, 1, 2, 2});
    for (float v : y.data()) CHECK(v == doctest::Approx(5.f));
}

TEST_CASE("conv2d_transpose shape formula stride 2") {
    Tape tape;
    Tensor x = Tensor::zeros({1, 1, 2, 2});
    Tensor w = Tensor::zeros({1, 1, 2, 2});
    Tensor b = Tensor::zeros({1});
    Tensor y = conv2d_transpose(tape, x, w, b, 2, 0);
    CHECK(y.shape() == Shape{1, 1, 4, 4});
}

TEST_CASE("conv adjoint inner-product identity") {
    Rng rng(3);
    // sizes chosen so (H + 2p - k) divides the stride; otherwise the
    // transpose cannot return to the original shape
    const std::tuple<int, int, int> cases[] = {{1, 0, 6}, {2, 1, 7}, {2, 0, 7}};
    for (auto [stride, pad, hh] : cases) {
        Tensor x = random_tensor({2, 3, hh, hh}, rng);
        Tensor w = random_tensor({4, 3, 3, 3}, rng);
        Tensor zb_f = Tensor::zeros({4});
        Tensor zb_c = Tensor::zeros({3});
        Tape tape;
        Tensor cx = conv2d(tape, x, w, zb_f, stride, pad);
        Tensor y = random_tensor(cx.shape(), rng);
        Tensor ty = conv2d_transpose(tape, y, w, zb_c, stride, pad);
        CHECK(ty.shape() == x.shape());
        double lhs = testutil::dot(cx.data(), y.data());
        double rhs = testutil::dot(x.data(), ty.data());
        CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("conv shape algebra sweep") {
    Rng rng(5);
    for (int h : {5, 8, 13})
        for (int k : {1, 2, 3, 4})
            for (int s : {1, 2, 3})
                for (int p : {0, 1, 2}) {
                    if (k > h + 2 * p) continue;
                    Tensor x = random_tensor({1, 2, h, h}, rng);
                    Tensor w = random_tensor({3, 2, k, k}, rng);
                    Tensor b = Tensor::zeros({3});
                    Tape tape;
                    Tensor y = conv2d(tape, x, w, b, s, p);
                    int expect = (h + 2 * p - k) / s + 1;
                    CHECK(y.dim(2) == expect);
                    auto ref = testutil::conv2d_reference(
                        {x.data().begin(), x.data().end()}, 1, 2, h, h,
                        {w.data().begin(), w.data().end()}, 3, k, k, {0, 0, 0}, s, p, expect,
                        expect);
                    CHECK(testutil::max_abs_diff(y.data(), ref) < 1e-4);

                    int ht = (expect - 1) * s - 2 * p + k;
                    Tensor wt = random_tensor({3, 2, k, k}, rng);
                    Tensor bt = Tensor::zeros({2});
                    Tensor yt = conv2d_transpose(tape, y, wt, bt, s, p);
                    CHECK(yt.dim(2) == ht);
                }
}

TEST_CASE("elementwise examples") {
    Tape tape;
    Tensor x = Tensor::from({3}, {-1.f, 0.f, 2.f});
    Tensor r = relu(tape, x);
    CHECK(r.data()[0] == 0.f);
    CHECK(r.data()[1] == 0.f);
    CHECK(r.data()[2] == 2.f);

    Tensor s = sigmoid_act(tape, Tensor::from({1}, {0.f}));
    CHECK(s.item() == doctest::Approx(0.5f));

    Tensor l = leaky_relu(tape, x, 0.2f);
    CHECK(l.data()[0] == doctest::Approx(-0.2f));
}

TEST_CASE("tanh gradient at zero is one") {
    DTensor x = DTensor::scalar(0.0);
    x.set_requires_grad(true);
    DTape tape;
    DTensor y = tanh_act(tape, x);
    tape.backward(y);
    CHECK(x.grad()[0] == doctest::Approx(1.0));

    // central differences, h = 1e-4
    double h = 1e-4;
    double fd = (std::tanh(h) - std::tanh(-h)) / (2 * h);
    CHECK(x.grad()[0] == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("linear examples") {
    Tape tape;
    SUBCASE("identity weight") {
        Tensor x = Tensor::from({2, 2}, {1, 2, 3, 4});
        Tensor w = Tensor::from({2, 2}, {1, 0, 0, 1});
        Tensor b = Tensor::zeros({2});
        Tensor y = linear(tape, x, w, b);
        for (std::size_t i = 0; i < 4; ++i) CHECK(y.data()[i] == x.data()[i]);
    }
    SUBCASE("sum with bias") {
        Tensor x = Tensor::from({1, 2}, {1, 2});
        Tensor w = Tensor::from({2, 1}, {1, 1});
        Tensor b = Tensor::from({1}, {3});
        CHECK(linear(tape, x, w, b).item() == doctest::Approx(6.f));
    }
    SUBCASE("random vs oracle") {
        Rng rng(17);
        Tensor x = testutil::random_tensor({4, 8}, rng);
        Tensor w = testutil::random_tensor({8, 3}, rng);
        Tensor b = Tensor::zeros({3});
        Tensor y = linear(tape, x, w, b);
        auto ref = testutil::matmul_reference({x.data().begin(), x.data().end()},
                                              {w.data().begin(), w.data().end()}, 4, 8, 3);
        CHECK(testutil::max_abs_diff(y.data(), ref) < 1e-6);
    }
    SUBCASE("shape mismatch") {
        Tensor x = Tensor::zeros({2, 3});
        Tensor w = Tensor::zeros({4, 2});
        Tensor b = Tensor::zeros({2});
        CHECK_THROWS_AS(linear(tape, x, w, b), ShapeError);
    }
}

TEST_CASE("loss examples") {
    Tape tape;
    Rng rng(23);
    Tensor x = testutil::random_tensor({4, 4}, rng);
    CHECK(l1_loss(tape, x, x).item() == 0.f);

    Tensor p = Tensor::from({1}, {0.5f});
    CHECK(bce_loss(tape, p, 1.f).item() == doctest::Approx(std::log(2.f)));

    Tensor a = Tensor::zeros({2, 2});
    Tensor b = Tensor::from({2, 2}, {1, 1, 1, 1});
    CHECK(l2_loss(tape, a, b).item() == doctest::Approx(1.f));
    CHECK_THROWS_AS(l1_loss(tape, a, Tensor::zeros({3})), ShapeError);
}

TEST_CASE("backward basics") {
    SUBCASE("sum gradient is ones") {
        Tensor x = Tensor::from({3}, {4.f, 5.f, 6.f});
        x.set_requires_grad(true);
        Tape tape;
        Tensor loss = sum_all(tape, x);
        tape.backward(loss);
        for (float g : x.grad()) CHECK(g == 1.f);
    }
    SUBCASE("mean-reduced l2 against zero") {
        Tensor x = Tensor::from({1}, {2.f});
        x.set_requires_grad(true);
        Tape tape;
        Tensor loss = l2_loss(tape, x, Tensor::zeros({1}));
        tape.backward(loss);
        CHECK(x.grad()[0] == doctest::Approx(4.f));
    }
    SUBCASE("non-scalar loss rejected") {
        Tensor x = Tensor::from({2}, {1.f, 2.f});
        x.set_requires_grad(true);
        Tape tape;
        Tensor y = relu(tape, x);
        CHECK_THROWS_AS(tape.backward(y), ShapeError);
    }
    SUBCASE("unreachable grads stay zero") {
        Tensor x = Tensor::from({2}, {1.f, 2.f});
        Tensor other = Tensor::from({2}, {3.f, 4.f});
        x.set_requires_grad(true);
        other.set_requires_grad(true);
        Tape tape;
        Tensor loss = sum_all(tape, x);
        tape.backward(loss);
        for (float g : other.grad()) CHECK(g == 0.f);
    }
}

TEST_CASE("instance_norm normalizes per channel") {
    Rng rng(31);
    Tensor x = testutil::random_tensor({2, 3, 5, 5}, rng, 0.0, 4.0);
    Tape tape;
    Tensor y = instance_norm(tape, x, 1e-5f);
    const std::size_t plane = 25;
    for (int g = 0; g < 6; ++g) {
        double mu = 0, var = 0;
        for (std::size_t p = 0; p < plane; ++p) mu += y.data()[g * plane + p];
        mu /= plane;
        for (std::size_t p = 0; p < plane; ++p) {
            double d = y.data()[g * plane + p] - mu;
            var += d * d;
        }
        var /= plane;
        CHECK(std::abs(mu) < 1e-5);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("determinism: same seed, same tensors") {
    auto build = [](std::uint64_t seed) {
        Rng rng(seed);
        Tensor x = testutil::random_tensor({2, 3, 8, 8}, rng);
        Tensor w = testutil::random_tensor({4, 3, 3, 3}, rng);
        Tensor b = testutil::random_tensor({4}, rng);
        Tape tape;
        return conv2d(tape, x, w, b, 1, 1);
    };
    Tensor a = build(99), b = build(99);
    for (std::size_t i = 0; i < a.numel(); ++i) CHECK(a.data()[i] == b.data()[i]);
}
