#include "fpgm/prox.hpp"

#include <algorithm>
#include <cmath>

namespace fpgm {

Vec project_nonneg(ConstSpan x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
    return out;
}

namespace {

// P_C[x - w D^T(p, q)]
void primal_from_dual(ConstSpan x, ConstSpan p, ConstSpan q, GridShape g, double w, Vec& out,
                      Vec& scratch) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    forward_differences_adjoint(p, q, g, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x[i] - w * scratch[i];
        out[i] = v > 0.0 ? v : 0.0;
    }
}

double dist_sq_to(ConstSpan a, ConstSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

} // namespace

Vec prox_tv_nonneg(ConstSpan x, GridShape grid, double lambda, double L, int inner_iters,
                   TvDualState* warm, const TvProxObserver& observer) {
    require_size(x, grid.size(), "prox_tv_nonneg");
    if (!(lambda >= 0.0)) throw ContractError("prox_tv_nonneg: lambda must be nonnegative");
    if (!(L > 0.0)) throw ContractError("prox_tv_nonneg: L must be positive");
    if (inner_iters < 1) throw ContractError("prox_tv_nonneg: inner_iters must be positive");

    const double w = lambda / L;
    if (w == 0.0) return project_nonneg(x);

    const std::size_t n = grid.size();
    Vec p_prev(n, 0.0), q_prev(n, 0.0);
    if (warm != nullptr && warm->p.size() == n && warm->q.size() == n) {
        p_prev = warm->p;
        q_prev = warm->q;
    }
    Vec r = p_prev, s = q_prev;
    Vec p(n), q(n), primal(n), scratch(n);
    // ||D||^2 <= 8, so the dual gradient is Lipschitz with constant 8 w^2
    // relative to the scaling used here.
    const double step = 1.0 / (8.0 * w);
    double t = 1.0;

    // The dual iteration is not monotone in the primal objective; the output
    // is the best primal point seen, starting from the one of the initial duals.
    auto objective = [&](const Vec& u) {
        return w * total_variation(u, grid) + 0.5 * dist_sq_to(u, x);
    };
    Vec best(n);
    primal_from_dual(x, p_prev, q_prev, grid, w, best, scratch);
    double best_obj = objective(best);

    for (int k = 1; k <= inner_iters; ++k) {
        primal_from_dual(x, r, s, grid, w, primal, scratch);
        const Gradient2D d = forward_differences(primal, grid);
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = r[i] + step * d.dx[i];
            const double qi = s[i] + step * d.dy[i];
            const double scale = std::max(1.0, std::sqrt(pi * pi + qi * qi));
            p[i] = pi / scale;
            q[i] = qi / scale;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = p[i] + momentum * (p[i] - p_prev[i]);
            s[i] = q[i] + momentum * (q[i] - q_prev[i]);
        }
        t = t_next;
        std::swap(p, p_prev);
        std::swap(q, q_prev);

        primal_from_dual(x, p_prev, q_prev, grid, w, primal, scratch);
        const double obj = objective(primal);
        if (obj <= best_obj) {
            best_obj = obj;
            best.swap(primal);
        }
        if (observer) observer(k, best);
    }

    if (warm != nullptr) {
        warm->p = std::move(p_prev);
        warm->q = std::move(q_prev);
    }
    return best;
}

Vec proximal_gradient_step(const NonsmoothPart& phi, const SmoothEval& at_y, double L,
                           ConstSpan y, ProxCache* cache) {
    if (!(L > 0.0)) throw ContractError("proximal_gradient_step: L must be positive");
    require_size(at_y.grad, y.size(), "proximal_gradient_step");
    Vec v(y.begin(), y.end());
    axpy(-1.0 / L, at_y.grad, v);
    return phi.prox(v, L, cache);
}

Vec proximal_gradient_step(const SmoothPart& f, const NonsmoothPart& phi, double L, ConstSpan y,
                           ProxCache* cache) {
    return proximal_gradient_step(phi, smooth_eval(f, y), L, y, cache);
}

Vec NonnegIndicator::prox(ConstSpan v, double, ProxCache*) const { return project_nonneg(v); }

std::unique_ptr<ProxCache> TvNonneg::make_cache() const {
    if (!warm_start_) return nullptr;
    return std::make_unique<TvDualState>();
}

Vec TvNonneg::prox(ConstSpan v, double L, ProxCache* cache) const {
    auto* warm = warm_start_ ? dynamic_cast<TvDualState*>(cache) : nullptr;
    return prox_tv_nonneg(v, grid_, lambda_, L, inner_iters_, warm);
}

} // namespace fpgm
