#include "mimic/core/adam.hpp"

#include <cmath>

#include "mimic/core/kernels.hpp"

namespace mimic::core {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (auto& p : params_) {
        if (!p.requires_grad()) throw ShapeError("Adam parameter without gradient buffer");
        m_.emplace_back(p.numel(), 0.f);
        v_.emplace_back(p.numel(), 0.f);
    }
}

void Adam::step() {
    ++t_;
    const float bias1 = 1.f - std::pow(cfg_.beta1, static_cast<float>(t_));
    const float bias2 = 1.f - std::pow(cfg_.beta2, static_cast<float>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        kernels::active().adam(p.data().data(), p.grad().data(), m_[i].data(), v_[i].data(),
                               p.numel(), cfg_.lr, cfg_.beta1, cfg_.beta2, cfg_.eps, bias1,
                               bias2);
        p.zero_grad();
    }
}

}  // namespace mimic::core
