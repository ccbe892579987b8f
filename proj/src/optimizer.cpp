#include "miltag/optimizer.hpp"

#include <cmath>

#include "miltag/error.hpp"

namespace miltag {

AdamState::AdamState(const std::vector<Tensor>& params, AdamConfig config) : cfg(config) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const Tensor& p : params) {
        m.push_back(Tensor::zeros_like(p));
        v.push_back(Tensor::zeros_like(p));
    }
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw Error(Errc::ShapeMismatch, "parameter/gradient/state tensor counts differ");
    }
    state.t += 1;
    const double b1 = state.cfg.beta1;
    const double b2 = state.cfg.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

    for (std::size_t t = 0; t < params.size(); ++t) {
        if (!params[t].same_shape(grads[t])) {
            throw Error(Errc::ShapeMismatch, "gradient tensor " + std::to_string(t) +
                                                 " has shape " + shape_str(grads[t].shape()) +
                                                 ", parameter has " +
                                                 shape_str(params[t].shape()));
        }
        double* p = params[t].data();
        const double* g = grads[t].data();
        double* m = state.m[t].data();
        double* v = state.v[t].data();
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            p[i] -= state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.epsilon);
        }
    }
}

} // namespace miltag
