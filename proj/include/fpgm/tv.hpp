#pragma once

#include <cstddef>

#include "fpgm/vec.hpp"

namespace fpgm {

/// Pixel grid layout shared by images, TV and the projector. Pixel (col, row)
/// lives at index row * width + col; row 0 is the bottom of the image, so the
/// pixel "above" is row + 1 and the pixel "to the right" is col + 1.
struct GridShape {
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t size() const { return width * height; }
    static GridShape square(std::size_t n) { return {n, n}; }
    bool operator==(const GridShape&) const = default;
};

/// Forward differences (x_i - x_right(i), x_i - x_above(i)). Differences that
/// would reach outside the grid are zero.
struct Gradient2D {
    Vec dx;
    Vec dy;
};

Gradient2D forward_differences(ConstSpan x, GridShape g);

/// Adjoint of forward_differences: accumulates D^T(p, q) into out.
void forward_differences_adjoint(ConstSpan p, ConstSpan q, GridShape g, MutSpan out);

/// Isotropic total variation: sum_i sqrt((x_i - x_r(i))^2 + (x_i - x_a(i))^2).
double total_variation(ConstSpan x, GridShape g);

} // namespace fpgm
