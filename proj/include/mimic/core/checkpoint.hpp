#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mimic/core/tensor.hpp"

namespace mimic::core {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

/// Weight checkpoint: magic "MIMW", version u32 LE, then per-tensor records
/// {name_len u32, name bytes, rank u32, dims u32 x rank, f32 LE data}.
/// Round-trips are bit-exact.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::string& path);

/// Copy checkpoint values into live parameters, matched by name; every
/// parameter must be found with an identical shape.
void restore_parameters(const std::vector<NamedTensor>& loaded,
                        std::vector<NamedTensor>& params, const std::string& origin);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace mimic::core
