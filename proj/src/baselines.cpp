#include "fpgm/baselines.hpp"

#include <cmath>
#include <numeric>

namespace fpgm {

namespace {

constexpr double kRootThreshold = 1e-12;

double squared_residual(const LinearOperator& R, ConstSpan b, ConstSpan x) {
    const Vec r = R.apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += (r[i] - b[i]) * (r[i] - b[i]);
    return s;
}

} // namespace

std::vector<std::size_t> efficient_order(std::size_t views, std::size_t rays_per_view) {
    if (views < 1 || rays_per_view < 1) throw ContractError("efficient_order: empty geometry");
    int bits = 0;
    while ((std::size_t{1} << bits) < views) ++bits;
    std::vector<std::size_t> order;
    order.reserve(views * rays_per_view);
    for (std::size_t k = 0; k < (std::size_t{1} << bits); ++k) {
        std::size_t v = 0;
        for (int j = 0; j < bits; ++j)
            if (k & (std::size_t{1} << j)) v |= std::size_t{1} << (bits - 1 - j);
        if (v >= views) continue;
        for (std::size_t r = 0; r < rays_per_view; ++r) order.push_back(v * rays_per_view + r);
    }
    return order;
}

std::vector<SparseRow> collect_rows(const LinearOperator& R) {
    std::vector<SparseRow> rows(R.nrows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = R.row(i);
    return rows;
}

void art_sweep(const std::vector<SparseRow>& rows, ConstSpan b, MutSpan x, double alpha,
               const std::vector<std::size_t>& order) {
    require_size(b, rows.size(), "art_sweep: b");
    for (std::size_t i : order) {
        if (i >= rows.size()) throw ContractError("art_sweep: order index out of range");
        const SparseRow& r = rows[i];
        if (r.squared_norm == 0.0) continue;
        const double c = alpha * (r.dot(x) - b[i]) / r.squared_norm;
        for (std::size_t k = 0; k < r.indices.size(); ++k) x[r.indices[k]] -= c * r.values[k];
    }
}

Vec art_sweep(const LinearOperator& R, ConstSpan b, ConstSpan x, double alpha,
              const std::vector<std::size_t>& order) {
    require_size(x, R.ncols(), "art_sweep: x");
    Vec out(x.begin(), x.end());
    art_sweep(collect_rows(R), b, out, alpha, order);
    return out;
}

Vec nonascending_tv(ConstSpan x, GridShape g) {
    require_size(x, g.size(), "nonascending_tv");
    const std::size_t W = g.width;
    const std::size_t H = g.height;
    const Gradient2D d = forward_differences(x, g);
    Vec root(g.size());
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = std::hypot(d.dx[i], d.dy[i]);

    Vec t(g.size(), 0.0);
    for (std::size_t row = 0; row < H; ++row) {
        for (std::size_t col = 0; col < W; ++col) {
            const std::size_t i = row * W + col;
            double grad = 0.0;
            bool defined = true;
            // The pixel's own term depends on x_i unless it has no neighbor at all.
            if (col + 1 < W || row + 1 < H) {
                if (root[i] < kRootThreshold) defined = false;
                else grad += (d.dx[i] + d.dy[i]) / root[i];
            }
            if (defined && col > 0) {
                const std::size_t j = i - 1;
                if (root[j] < kRootThreshold) defined = false;
                else grad -= d.dx[j] / root[j];
            }
            if (defined && row > 0) {
                const std::size_t j = i - W;
                if (root[j] < kRootThreshold) defined = false;
                else grad -= d.dy[j] / root[j];
            }
            t[i] = defined ? grad : 0.0;
        }
    }
    const double n = norm(t);
    if (n == 0.0) return t;
    for (double& v : t) v = -v / n;
    return t;
}

SupTvResult suptv(ConstSpan x, GridShape grid, long l, const SupTvParams& p) {
    if (l < 0) throw ContractError("suptv: l must be >= 0");
    if (!(p.a > 0.0 && p.a < 1.0)) throw ContractError("suptv: a must lie in (0, 1)");
    if (!(p.b > 0.0)) throw ContractError("suptv: b must be positive");
    if (p.I < 0) throw ContractError("suptv: I must be >= 0");
    Vec y(x.begin(), x.end());
    double tv_y = total_variation(y, grid);
    Vec trial(y.size());
    for (int i = 0; i < p.I; ++i) {
        const Vec t = nonascending_tv(y, grid);
        double tv_trial;
        long trials = 0;
        do {
            if (++trials > p.max_trials)
                throw NumericalError("suptv: no non-ascending step found after " +
                                     std::to_string(p.max_trials) + " trials");
            const double step = p.b * std::pow(p.a, static_cast<double>(l));
            for (std::size_t j = 0; j < y.size(); ++j) trial[j] = y[j] + step * t[j];
            ++l;
            tv_trial = total_variation(trial, grid);
        } while (tv_trial > tv_y);
        y.swap(trial);
        tv_y = tv_trial;
    }
    return {std::move(y), l};
}

SupArtResult supart(const LinearOperator& R, ConstSpan b, ConstSpan x0, GridShape grid, double eps,
                    const std::vector<std::size_t>& order, const SupArtParams& params,
                    const SupArtObserver& observer) {
    if (!(eps > 0.0)) throw ContractError("supart: eps must be positive");
    require_size(b, R.nrows(), "supart: b");
    require_size(x0, R.ncols(), "supart: x0");
    if (grid.size() != R.ncols()) throw ContractError("supart: grid does not match operator");

    Vec x(x0.begin(), x0.end());
    double residual = squared_residual(R, b, x);
    if (!(residual > eps)) return {std::move(x), 0, residual};

    const auto rows = collect_rows(R);
    long l = 0;
    long k = 0;
    while (residual > eps) {
        if (k >= params.max_sweeps)
            throw NumericalError("supart: residual " + std::to_string(residual) +
                                 " still above eps after " + std::to_string(k) + " sweeps");
        const double tv_before = observer ? total_variation(x, grid) : 0.0;
        const long l_before = l;
        SupTvResult half = suptv(x, grid, l, params.suptv);
        l = half.l;
        x = std::move(half.y);
        const double tv_after = observer ? total_variation(x, grid) : 0.0;
        art_sweep(rows, b, x, params.alpha, order);
        ++k;
        residual = squared_residual(R, b, x);
        if (observer) observer({k, tv_before, tv_after, l_before, l, residual});
    }
    return {std::move(x), k, residual};
}

} // namespace fpgm
