#include "fpgm/tv.hpp"

#include <cmath>

namespace fpgm {

Gradient2D forward_differences(ConstSpan x, GridShape g) {
    require_size(x, g.size(), "forward_differences");
    Gradient2D d{Vec(g.size(), 0.0), Vec(g.size(), 0.0)};
    for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
            const std::size_t i = r * g.width + c;
            if (c + 1 < g.width) d.dx[i] = x[i] - x[i + 1];
            if (r + 1 < g.height) d.dy[i] = x[i] - x[i + g.width];
        }
    }
    return d;
}

void forward_differences_adjoint(ConstSpan p, ConstSpan q, GridShape g, MutSpan out) {
    require_size(p, g.size(), "forward_differences_adjoint");
    require_size(q, g.size(), "forward_differences_adjoint");
    require_size(out, g.size(), "forward_differences_adjoint");
    for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
            const std::size_t i = r * g.width + c;
            double v = 0.0;
            if (c + 1 < g.width) v += p[i];
            if (c > 0) v -= p[i - 1];
            if (r + 1 < g.height) v += q[i];
            if (r > 0) v -= q[i - g.width];
            out[i] += v;
        }
    }
}

double total_variation(ConstSpan x, GridShape g) {
    require_size(x, g.size(), "total_variation");
    double tv = 0.0;
    for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
            const std::size_t i = r * g.width + c;
            const double dx = c + 1 < g.width ? x[i] - x[i + 1] : 0.0;
            const double dy = r + 1 < g.height ? x[i] - x[i + g.width] : 0.0;
            tv += std::sqrt(dx * dx + dy * dy);
        }
    }
    return tv;
}

} // namespace fpgm
