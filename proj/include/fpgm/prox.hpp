#pragma once

#include <functional>

#include "fpgm/objective.hpp"
#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Componentwise max(x, 0): the Euclidean projection onto x >= 0.
Vec project_nonneg(ConstSpan x);

/// Dual variables of the TV prox subproblem, one (p, q) pair per pixel.
/// Kept between calls when warm starting.
struct TvDualState final : ProxCache {
    Vec p;
    Vec q;
};

/// Called after each inner iteration with the current primal estimate.
using TvProxObserver = std::function<void(int iteration, ConstSpan primal)>;

/// Approximate argmin_u { lambda TV(u) + indicator(u >= 0) + (L/2) ||u - x||^2 }
/// by inner_iters steps of the fast gradient projection method applied to the
/// dual problem. The result is always nonnegative. When warm is non-null its
/// dual variables seed the iteration and receive the final ones.
Vec prox_tv_nonneg(ConstSpan x, GridShape grid, double lambda, double L, int inner_iters,
                   TvDualState* warm = nullptr, const TvProxObserver& observer = {});

/// P_L(y) = prox_{phi,L}(y - grad f(y) / L).
Vec proximal_gradient_step(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan y,
                           ProxCache* cache = nullptr);

/// Same step when grad f(y) is already known.
Vec proximal_gradient_step(const NonsmoothPart& phi, const SmoothEval& at_y, double L,
                           ConstSpan y, ProxCache* cache = nullptr);

} // namespace fpgm
