#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimic::core {

class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (int d : s) {
        if (d <= 0) throw ShapeError("non-positive dimension in shape");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

/// Dense n-d array with an optional gradient buffer. A tensor is a shape
/// attached to shared storage, so reshape() is a view: data and grad are
/// shared between the original and the reshaped handle. Ops treat tensors
/// they have written as immutable.
template <class T>
class TensorT {
    struct Storage {
        std::vector<T> data;
        std::vector<T> grad;   // sized like data iff requires_grad
        bool requires_grad = false;
    };

public:
    TensorT() : shape_{1}, s_(std::make_shared<Storage>()) { s_->data.assign(1, T(0)); }

    static TensorT zeros(Shape shape) {
        TensorT t;
        std::size_t n = shape_numel(shape);
        t.shape_ = std::move(shape);
        t.s_->data.assign(n, T(0));
        return t;
    }

    static TensorT full(Shape shape, T value) {
        TensorT t = zeros(std::move(shape));
        for (auto& v : t.s_->data) v = value;
        return t;
    }

    static TensorT from(Shape shape, std::vector<T> values) {
        TensorT t;
        if (shape_numel(shape) != values.size())
            throw ShapeError("element count " + std::to_string(values.size()) +
                             " does not match shape " + shape_str(shape));
        t.shape_ = std::move(shape);
        t.s_->data = std::move(values);
        return t;
    }

    static TensorT scalar(T value) { return from({1}, {value}); }

    const Shape& shape() const { return shape_; }
    int dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const { return s_->data.size(); }

    std::span<T> data() { return {s_->data.data(), s_->data.size()}; }
    std::span<const T> data() const { return {s_->data.data(), s_->data.size()}; }

    T item() const {
        if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape_));
        return s_->data[0];
    }

    bool requires_grad() const { return s_->requires_grad; }

    TensorT& set_requires_grad(bool on) {
        s_->requires_grad = on;
        if (on && s_->grad.size() != s_->data.size()) s_->grad.assign(s_->data.size(), T(0));
        if (!on) s_->grad.clear();
        return *this;
    }

    bool has_grad() const { return !s_->grad.empty(); }

    std::span<T> grad() {
        if (s_->grad.empty()) throw ShapeError("tensor has no gradient buffer");
        return {s_->grad.data(), s_->grad.size()};
    }
    std::span<const T> grad() const {
        if (s_->grad.empty()) throw ShapeError("tensor has no gradient buffer");
        return {s_->grad.data(), s_->grad.size()};
    }

    void zero_grad() {
        for (auto& g : s_->grad) g = T(0);
    }

    /// Same values, cut from any graph; fresh storage, never requires grad.
    TensorT detach() const {
        TensorT t;
        t.shape_ = shape_;
        t.s_->data = s_->data;
        return t;
    }

    TensorT clone() const {
        TensorT t = detach();
        t.set_requires_grad(s_->requires_grad);
        return t;
    }

    /// View with a new shape of equal element count; shares data and grad.
    TensorT reshape(Shape shape) const {
        if (shape_numel(shape) != numel())
            throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(shape));
        TensorT t;
        t.shape_ = std::move(shape);
        t.s_ = s_;
        return t;
    }

    bool same_storage(const TensorT& other) const { return s_ == other.s_; }

private:
    Shape shape_;
    std::shared_ptr<Storage> s_;
};

using Tensor = TensorT<float>;
using DTensor = TensorT<double>;

}  // namespace mimic::core
