#pragma once

#include <cstdint>
#include <vector>

#include "miltag/tensor.hpp"

namespace miltag {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::uint64_t t = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    AdamConfig cfg;

    AdamState() = default;
    AdamState(const std::vector<Tensor>& params, AdamConfig cfg);
};

/// Bias-corrected Adam update, applied in place.
/// Errors: ShapeMismatch if params/grads/state disagree.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state);

} // namespace miltag
