#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sclw/errors.hpp"
#include "sclw/mlp.hpp"
#include "sclw/optim.hpp"
#include "sclw/rng.hpp"

namespace sclw {

// Per-task subnetwork selection over a shared weight tensor. Each weight
// carries a learnable importance score; a task trains inside the mask of its
// top-scoring weights, weights claimed by earlier tasks are frozen, and the
// score step amplifies gradients for weights that are frozen or unselected
// so later tasks keep exploring the full tensor.

struct TaskMask {
    std::uint32_t task_id = 0;
    std::vector<std::uint32_t> class_set;
    WeightMask mask;
};

struct ScoredParameterSet {
    ParameterSet theta;
    std::vector<Tensor2> scores;  // one score per weight entry; biases are unscored
    WeightMask history;           // union of all committed task masks
    double sparsity_c = 0.5;
    std::vector<std::uint32_t> committed_tasks;
};

inline ScoredParameterSet make_scored_params(const MlpArchitecture& arch, double sparsity_c,
                                             std::uint64_t seed) {
    if (!(sparsity_c > 0.0 && sparsity_c <= 1.0)) throw ConfigError("sparsity must be in (0, 1]");
    ScoredParameterSet sps;
    sps.theta = init_params(arch, seed);
    sps.sparsity_c = sparsity_c;
    sps.history = WeightMask::zeros_for(sps.theta);
    Rng rng(mix_seed(seed, 0x73636f7265ull));  // "score"
    for (const auto& w : sps.theta.weights) {
        Tensor2 s(w.rows, w.cols);
        for (double& v : s.data) v = rng.uniform();
        sps.scores.push_back(std::move(s));
    }
    return sps;
}

// ceil(c * n) with a guard against cases like 0.3 * 10 landing just above 3.
inline std::size_t mask_capacity(double c, std::size_t n) {
    const double t = c * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(t - 1e-9));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

// Top-c% scores per weight tensor; ties broken by lowest flat index.
inline TaskMask select_mask(const ScoredParameterSet& sps, std::uint32_t task_id,
                            std::vector<std::uint32_t> class_set) {
    TaskMask tm;
    tm.task_id = task_id;
    tm.class_set = std::move(class_set);
    tm.mask = WeightMask::zeros_for(sps.theta);
    for (std::size_t l = 0; l < sps.scores.size(); ++l) {
        const auto& s = sps.scores[l].data;
        const std::size_t n = s.size();
        const std::size_t k = mask_capacity(sps.sparsity_c, n);
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&s](std::uint32_t a, std::uint32_t b) { return s[a] > s[b]; });
        auto& m = tm.mask.layers[l];
        for (std::size_t i = 0; i < k; ++i) m[order[i]] = 1;
    }
    return tm;
}

// Forward with effective weights theta * m_t; biases are always active.
inline ForwardResult masked_forward(const ScoredParameterSet& sps, const TaskMask& tm,
                                    const MlpArchitecture& arch, const Tensor2& batch) {
    if (!tm.mask.same_shape(sps.theta)) throw DimensionError("task mask does not match parameters");
    ParameterSet eff = sps.theta;
    for (std::size_t l = 0; l < eff.weights.size(); ++l) {
        auto& w = eff.weights[l].data;
        const auto& m = tm.mask.layers[l];
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!m[i]) w[i] = 0.0;
    }
    return forward(eff, arch, batch);
}

struct SplitGradients {
    ParameterSet theta_grad;           // masked, frozen entries zeroed; biases pass through
    std::vector<Tensor2> score_grad;   // straight-through: effective grad * theta, all entries
};

inline SplitGradients split_gradients(const ParameterSet& effective_grad, const ScoredParameterSet& sps,
                                      const TaskMask& tm) {
    if (!effective_grad.same_shape(sps.theta))
        throw DimensionError("split_gradients: gradient shape mismatch");
    SplitGradients out;
    out.theta_grad = effective_grad;
    for (std::size_t l = 0; l < sps.theta.weights.size(); ++l) {
        const auto& m = tm.mask.layers[l];
        const auto& hist = sps.history.layers[l];
        auto& tg = out.theta_grad.weights[l].data;
        Tensor2 sg = zeros_like(sps.scores[l]);
        const auto& g = effective_grad.weights[l].data;
        const auto& th = sps.theta.weights[l].data;
        for (std::size_t i = 0; i < tg.size(); ++i) {
            sg.data[i] = g[i] * th[i];
            if (!m[i] || hist[i]) tg[i] = 0.0;
        }
        out.score_grad.push_back(std::move(sg));
    }
    return out;
}

// Plain SGD on scores; the gradient is scaled by gamma wherever the weight is
// already frozen (history = 1) or unselected by the current mask (m_t = 0).
inline void score_gradient_step(ScoredParameterSet& sps, const std::vector<Tensor2>& score_grad,
                                const TaskMask& tm, double gamma, double eta) {
    if (score_grad.size() != sps.scores.size()) throw DimensionError("score gradient shape mismatch");
    for (std::size_t l = 0; l < sps.scores.size(); ++l) {
        auto& s = sps.scores[l].data;
        const auto& g = score_grad[l].data;
        const auto& m = tm.mask.layers[l];
        const auto& hist = sps.history.layers[l];
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (hist[i] || !m[i])
                s[i] = s[i] - eta * g[i] * gamma;
            else
                s[i] = s[i] - eta * g[i];
        }
    }
}

// Fold the finished task's mask into the history; the caller archives the
// mask itself for inference.
inline void commit_task(ScoredParameterSet& sps, const TaskMask& tm) {
    for (auto id : sps.committed_tasks)
        if (id == tm.task_id) throw UsageError("task " + std::to_string(tm.task_id) + " committed twice");
    for (std::size_t l = 0; l < sps.history.layers.size(); ++l) {
        auto& h = sps.history.layers[l];
        const auto& m = tm.mask.layers[l];
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = h[i] || m[i];
    }
    sps.committed_tasks.push_back(tm.task_id);
}

}  // namespace sclw
