#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fpgm/errors.hpp"

namespace fpgm {

using Vec = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

inline void require_size(ConstSpan v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw ContractError(std::string(what) + ": expected length " + std::to_string(n) +
                            ", got " + std::to_string(v.size()));
}

inline double dot(ConstSpan a, ConstSpan b) {
    require_size(b, a.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(ConstSpan a) { return dot(a, a); }
inline double norm(ConstSpan a) { return std::sqrt(norm_sq(a)); }

inline Vec sub(ConstSpan a, ConstSpan b) {
    require_size(b, a.size(), "sub");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

// y += alpha * x
inline void axpy(double alpha, ConstSpan x, MutSpan y) {
    require_size(x, y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double max_abs_diff(ConstSpan a, ConstSpan b) {
    require_size(b, a.size(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double sum(ConstSpan a) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

} // namespace fpgm
