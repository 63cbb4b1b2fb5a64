#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sclw/errors.hpp"

namespace sclw {

// Dense row-major matrix of doubles. The one numeric container everything
// else computes through; rows are samples, cols are features/classes.
struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite(const std::string& what) const {
        if (!all_finite()) throw NumericError(what + " contains non-finite entries");
    }
};

inline Tensor2 zeros_like(const Tensor2& t) { return Tensor2(t.rows, t.cols, 0.0); }

// rows [r0, r0+n) of src copied into a fresh tensor
inline Tensor2 take_rows(const Tensor2& src, const std::vector<std::size_t>& idx) {
    Tensor2 out(idx.size(), src.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* s = src.row(idx[i]);
        double* d = out.row(i);
        for (std::size_t c = 0; c < src.cols; ++c) d[c] = s[c];
    }
    return out;
}

}  // namespace sclw
