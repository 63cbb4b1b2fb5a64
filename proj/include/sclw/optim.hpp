#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include "sclw/errors.hpp"
#include "sclw/mlp.hpp"

namespace sclw {

struct AdamWState {
    std::uint64_t step_count = 0;
    ParameterSet first_moment;
    ParameterSet second_moment;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_num = 1e-8;
    double weight_decay = 1e-4;
};

inline AdamWState make_adamw(const ParameterSet& params, double weight_decay = 1e-4) {
    AdamWState s;
    s.first_moment = zeros_like(params);
    s.second_moment = zeros_like(params);
    s.weight_decay = weight_decay;
    return s;
}

// Per-weight-tensor byte masks; 1 = selected/frozen depending on context.
// Bias vectors are never masked, so the mask carries weight tensors only.
struct WeightMask {
    std::vector<std::vector<std::uint8_t>> layers;

    static WeightMask zeros_for(const ParameterSet& p) {
        WeightMask m;
        for (const auto& w : p.weights) m.layers.emplace_back(w.size(), std::uint8_t{0});
        return m;
    }

    bool same_shape(const ParameterSet& p) const {
        if (layers.size() != p.weights.size()) return false;
        for (std::size_t l = 0; l < layers.size(); ++l)
            if (layers[l].size() != p.weights[l].size()) return false;
        return true;
    }

    std::size_t popcount(std::size_t layer) const {
        std::size_t n = 0;
        for (auto b : layers[layer]) n += b ? 1 : 0;
        return n;
    }
};

namespace detail {

inline void adamw_tensor(double* theta, const double* grad, double* m, double* v, std::size_t n,
                         const AdamWState& s, double lr, double bc1, double bc2,
                         const std::uint8_t* freeze) {
    for (std::size_t i = 0; i < n; ++i) {
        if (freeze && freeze[i]) continue;
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= lr * (mhat / (std::sqrt(vhat) + s.eps_num) + s.weight_decay * theta[i]);
    }
}

}  // namespace detail

// Decoupled-weight-decay update. Coordinates under `freeze` (when given) are
// skipped entirely: no moment update, no decay, value untouched.
inline void adamw_step(ParameterSet& params, const ParameterSet& grads, AdamWState& state, double lr,
                       const WeightMask* freeze = nullptr) {
    if (!params.same_shape(grads) || !params.same_shape(state.first_moment))
        throw DimensionError("adamw_step: parameter/gradient/state shapes disagree");
    if (lr < 0.0) throw UsageError("adamw_step: negative learning rate");
    if (!grads.all_finite()) throw NumericError("adamw_step: non-finite gradient entries");

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        detail::adamw_tensor(params.weights[l].data.data(), grads.weights[l].data.data(),
                             state.first_moment.weights[l].data.data(),
                             state.second_moment.weights[l].data.data(), params.weights[l].size(),
                             state, lr, bc1, bc2, freeze ? freeze->layers[l].data() : nullptr);
        detail::adamw_tensor(params.biases[l].data(), grads.biases[l].data(),
                             state.first_moment.biases[l].data(), state.second_moment.biases[l].data(),
                             params.biases[l].size(), state, lr, bc1, bc2, nullptr);
    }
}

struct CosineSchedule {
    double eta_max = 3e-4;
    double eta_min = 0.0;
    std::uint64_t total_steps = 1;
};

inline double cosine_lr(const CosineSchedule& sched, std::uint64_t step) {
    if (step > sched.total_steps) {
        static bool warned = false;
        if (!warned) {
            std::fprintf(stderr, "cosine_lr: step %llu past schedule end %llu, clamping to eta_min\n",
                         static_cast<unsigned long long>(step),
                         static_cast<unsigned long long>(sched.total_steps));
            warned = true;
        }
        return sched.eta_min;
    }
    const double frac = static_cast<double>(step) / static_cast<double>(sched.total_steps);
    return sched.eta_min + 0.5 * (sched.eta_max - sched.eta_min) *
                               (1.0 + std::cos(3.1415926535897932384626433832795 * frac));
}

}  // namespace sclw
