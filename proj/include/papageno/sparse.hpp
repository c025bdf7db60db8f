#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace papageno {

// Indices strictly increasing, no stored zeros.
struct SparseVector {
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    std::size_t nnz() const { return index.size(); }
    bool empty() const { return index.empty(); }

    double squared_norm() const {
        double s = 0.0;
        for (double v : value) s += v * v;
        return s;
    }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& x, std::span<const double> dense) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.index.size(); ++k) s += x.value[k] * dense[x.index[k]];
    return s;
}

inline void axpy(double a, const SparseVector& x, std::span<double> dense) {
    for (std::size_t k = 0; k < x.index.size(); ++k) dense[x.index[k]] += a * x.value[k];
}

}  // namespace papageno
