#pragma once

#include <functional>
#include <vector>

#include "mimic/core/tensor.hpp"

namespace mimic::core {

/// Reverse-mode gradient tape. Ops append one node per recorded operation in
/// execution order, so the list is already topologically sorted; backward()
/// walks it once in reverse. A tape and the tensors recorded on it belong to
/// one logical execution stream.
template <class T>
class TapeT {
public:
    void record(std::function<void()> backward_fn) { nodes_.push_back(std::move(backward_fn)); }

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    /// Populate gradients of everything reachable from `loss`. The loss must
    /// be scalar; tensors not on a path to it keep their zero gradients.
    void backward(TensorT<T>& loss) {
        if (loss.numel() != 1)
            throw ShapeError("backward() needs a scalar loss, got " + shape_str(loss.shape()));
        if (!loss.requires_grad()) return;
        loss.grad()[0] = T(1);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
    }

private:
    std::vector<std::function<void()>> nodes_;
};

using Tape = TapeT<float>;
using DTape = TapeT<double>;

}  // namespace mimic::core
