#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sclw/errors.hpp"
#include "sclw/rng.hpp"
#include "sclw/tensor.hpp"

namespace sclw {

// Minimal dense network: rectifier between hidden layers, identity at the
// output. Reverse-mode gradients are exact; everything runs in double so
// oracle comparisons and bit-identity checks are meaningful.

struct MlpArchitecture {
    // input, hidden..., output widths; output = global class universe
    std::vector<std::size_t> widths;

    std::size_t num_layers() const { return widths.empty() ? 0 : widths.size() - 1; }
    std::size_t input_width() const { return widths.front(); }
    std::size_t output_width() const { return widths.back(); }

    void validate() const {
        if (widths.size() < 2) throw DimensionError("architecture needs at least input and output widths");
        for (auto w : widths)
            if (w == 0) throw DimensionError("architecture widths must be positive");
    }
};

struct ParameterSet {
    std::vector<Tensor2> weights;             // weights[l]: widths[l] x widths[l+1]
    std::vector<std::vector<double>> biases;  // biases[l]: widths[l+1]

    std::size_t num_layers() const { return weights.size(); }

    bool same_shape(const ParameterSet& o) const {
        if (weights.size() != o.weights.size() || biases.size() != o.biases.size()) return false;
        for (std::size_t l = 0; l < weights.size(); ++l)
            if (!weights[l].same_shape(o.weights[l]) || biases[l].size() != o.biases[l].size()) return false;
        return true;
    }

    bool all_finite() const {
        for (const auto& w : weights)
            if (!w.all_finite()) return false;
        for (const auto& b : biases)
            for (double v : b)
                if (!std::isfinite(v)) return false;
        return true;
    }
};

inline ParameterSet zero_params(const MlpArchitecture& arch) {
    ParameterSet p;
    for (std::size_t l = 0; l + 1 < arch.widths.size(); ++l) {
        p.weights.emplace_back(arch.widths[l], arch.widths[l + 1]);
        p.biases.emplace_back(arch.widths[l + 1], 0.0);
    }
    return p;
}

inline ParameterSet zeros_like(const ParameterSet& p) {
    ParameterSet g;
    for (const auto& w : p.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : p.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

// Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights, zero biases.
inline ParameterSet init_params(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    ParameterSet p = zero_params(arch);
    Rng rng(mix_seed(seed, 0x696e6974ull));  // "init"
    for (auto& w : p.weights) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w.rows));
        for (double& v : w.data) v = rng.uniform(-bound, bound);
    }
    return p;
}

struct ForwardCache {
    ParameterSet params;           // the parameters actually used (post-masking)
    std::vector<Tensor2> inputs;   // inputs[l] = activation entering layer l; inputs[0] = batch
    std::vector<Tensor2> preacts;  // preacts[l] = x*W[l] + b[l] before the rectifier
    std::size_t batch_rows = 0;
    std::size_t out_cols = 0;
};

struct ForwardResult {
    Tensor2 logits;
    ForwardCache cache;
};

namespace detail {

// out(N x K) = x(N x D) * w(D x K) + b; row-major friendly loop order
inline void affine(const Tensor2& x, const Tensor2& w, const std::vector<double>& b, Tensor2& out) {
    out = Tensor2(x.rows, w.cols);
    for (std::size_t n = 0; n < x.rows; ++n) {
        double* o = out.row(n);
        for (std::size_t k = 0; k < w.cols; ++k) o[k] = b[k];
        const double* xr = x.row(n);
        for (std::size_t d = 0; d < x.cols; ++d) {
            const double a = xr[d];
            if (a == 0.0) continue;
            const double* wr = w.row(d);
            for (std::size_t k = 0; k < w.cols; ++k) o[k] += a * wr[k];
        }
    }
}

}  // namespace detail

inline ForwardResult forward(const ParameterSet& params, const MlpArchitecture& arch, const Tensor2& batch) {
    arch.validate();
    if (params.num_layers() != arch.num_layers())
        throw DimensionError("parameter set does not match architecture");
    if (batch.cols != arch.input_width())
        throw DimensionError("batch has " + std::to_string(batch.cols) + " columns, expected " +
                             std::to_string(arch.input_width()));

    ForwardResult r;
    r.cache.params = params;
    r.cache.batch_rows = batch.rows;
    r.cache.out_cols = arch.output_width();
    r.cache.inputs.reserve(params.num_layers());
    r.cache.preacts.reserve(params.num_layers());

    Tensor2 x = batch;
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
        if (x.cols != params.weights[l].rows) throw DimensionError("layer " + std::to_string(l) + " shape mismatch");
        r.cache.inputs.push_back(x);
        Tensor2 z;
        detail::affine(x, params.weights[l], params.biases[l], z);
        r.cache.preacts.push_back(z);
        if (l + 1 < params.num_layers()) {
            for (double& v : z.data) v = v > 0.0 ? v : 0.0;
        }
        x = std::move(z);
    }
    r.logits = std::move(x);
    return r;
}

struct Gradients {
    ParameterSet params;  // same shapes as the forward parameters
    Tensor2 input;        // gradient w.r.t. the batch
};

// Exact gradients of the scalar loss whose logit-gradient is supplied.
inline Gradients backward(const ForwardCache& cache, const Tensor2& upstream_logit_grad) {
    const std::size_t L = cache.params.num_layers();
    if (L == 0 || cache.inputs.size() != L || cache.preacts.size() != L)
        throw UsageError("backward called with an empty or inconsistent cache");
    if (upstream_logit_grad.rows != cache.batch_rows || upstream_logit_grad.cols != cache.out_cols)
        throw UsageError("upstream gradient shape does not match the cached forward pass");

    Gradients g;
    g.params = zeros_like(cache.params);

    Tensor2 delta = upstream_logit_grad;
    for (std::size_t li = L; li-- > 0;) {
        const Tensor2& x = cache.inputs[li];
        const Tensor2& w = cache.params.weights[li];

        // db = column sums of delta
        auto& db = g.params.biases[li];
        for (std::size_t n = 0; n < delta.rows; ++n) {
            const double* dr = delta.row(n);
            for (std::size_t k = 0; k < delta.cols; ++k) db[k] += dr[k];
        }
        // dW[d,k] = sum_n x[n,d] * delta[n,k]
        Tensor2& dw = g.params.weights[li];
        for (std::size_t n = 0; n < delta.rows; ++n) {
            const double* xr = x.row(n);
            const double* dr = delta.row(n);
            for (std::size_t d = 0; d < x.cols; ++d) {
                const double a = xr[d];
                if (a == 0.0) continue;
                double* dwr = dw.row(d);
                for (std::size_t k = 0; k < delta.cols; ++k) dwr[k] += a * dr[k];
            }
        }
        // dX[n,d] = sum_k delta[n,k] * w[d,k], gated by the rectifier of the previous layer
        Tensor2 dx(x.rows, x.cols);
        for (std::size_t n = 0; n < x.rows; ++n) {
            const double* dr = delta.row(n);
            double* dxr = dx.row(n);
            for (std::size_t d = 0; d < x.cols; ++d) {
                const double* wr = w.row(d);
                double acc = 0.0;
                for (std::size_t k = 0; k < delta.cols; ++k) acc += dr[k] * wr[k];
                dxr[d] = acc;
            }
        }
        if (li > 0) {
            const Tensor2& z = cache.preacts[li - 1];
            for (std::size_t i = 0; i < dx.data.size(); ++i)
                if (!(z.data[i] > 0.0)) dx.data[i] = 0.0;
        }
        delta = std::move(dx);
    }
    g.input = std::move(delta);
    return g;
}

}  // namespace sclw
