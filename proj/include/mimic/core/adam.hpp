#pragma once

#include <cstdint>
#include <vector>

#include "mimic/core/tensor.hpp"

namespace mimic::core {

struct AdamConfig {
    float lr = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

/// Bias-corrected Adam over a fixed parameter list. Moment buffers start at
/// zero and the step counter advances by one per step() call.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig cfg);

    /// Apply one update from the gradients currently stored on the
    /// parameters, then clear those gradients.
    void step();

    std::int64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    AdamConfig& config() { return cfg_; }

private:
    std::vector<Tensor> params_;
    std::vector<std::vector<float>> m_, v_;
    AdamConfig cfg_;
    std::int64_t t_ = 0;
};

}  // namespace mimic::core
