#include "fpgm/radon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fpgm/parallel.hpp"

namespace fpgm {

namespace {

constexpr double kAxisEps = 1e-14;
constexpr double kOnLineTol = 1e-12; // in units of the pixel size
constexpr std::size_t kForwardBlocks = 64;
constexpr std::size_t kAdjointBlocks = 4;

// Parameters s in (s_lo, s_hi) where p + s d crosses a grid line -E + k h.
void crossings(double p, double d, double extent, double h, std::size_t n, double s_lo,
               double s_hi, std::vector<double>& out) {
    out.clear();
    if (std::abs(d) < kAxisEps) return;
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = (-extent + static_cast<double>(k) * h - p) / d;
        if (s > s_lo && s < s_hi) out.push_back(s);
    }
    if (d < 0.0) std::reverse(out.begin(), out.end());
}

// Grid line index k when coord sits on -E + k h (up to roundoff), else -1.
long grid_line(double coord, double extent, double h, std::size_t n) {
    const double f = (coord + extent) / h;
    const double k = std::round(f);
    if (k < 0.0 || k > static_cast<double>(n) || std::abs(f - k) > kOnLineTol) return -1;
    return static_cast<long>(k);
}

std::size_t cell_of(double coord, double extent, double h, std::size_t n) {
    const double f = std::floor((coord + extent) / h);
    if (f <= 0.0) return 0;
    const auto c = static_cast<std::size_t>(f);
    return c >= n ? n - 1 : c;
}

} // namespace

Geometry make_geometry(std::size_t views, std::size_t rays_per_view, std::size_t n_side,
                       double extent) {
    if (views < 2) throw ContractError("make_geometry: need at least 2 views");
    if (rays_per_view < 2) throw ContractError("make_geometry: need at least 2 rays per view");
    if (n_side < 1) throw ContractError("make_geometry: empty pixel grid");
    if (!(extent > 0.0)) throw ContractError("make_geometry: extent must be positive");
    Geometry g;
    g.views = views;
    g.rays_per_view = rays_per_view;
    g.n_side = n_side;
    g.extent = extent;
    g.theta.resize(views);
    g.offset.resize(rays_per_view);
    for (std::size_t v = 0; v < views; ++v)
        g.theta[v] = -std::numbers::pi * static_cast<double>(v) / static_cast<double>(views - 1);
    for (std::size_t r = 0; r < rays_per_view; ++r)
        g.offset[r] = -1.0 + 2.0 * static_cast<double>(r) / static_cast<double>(rays_per_view - 1);
    return g;
}

RadonOperator::RadonOperator(Geometry geometry, std::size_t cache_bytes)
    : geometry_(std::move(geometry)) {
    if (geometry_.views < 1 || geometry_.rays_per_view < 1 || geometry_.n_side < 1)
        throw ContractError("RadonOperator: degenerate geometry");
    cos_.resize(geometry_.views);
    sin_.resize(geometry_.views);
    for (std::size_t v = 0; v < geometry_.views; ++v) {
        cos_[v] = std::cos(geometry_.theta[v]);
        sin_[v] = std::sin(geometry_.theta[v]);
    }

    // A ray crosses at most 2 n pixels.
    const std::size_t m = geometry_.rays();
    const std::size_t n = geometry_.n_side;
    const double worst = static_cast<double>(m) * 2.0 * static_cast<double>(n) *
                         (sizeof(std::uint32_t) + sizeof(double));
    if (worst > static_cast<double>(cache_bytes) || n * n > UINT32_MAX) return;

    std::vector<std::vector<Segment>> per_ray(m);
    const std::size_t blocks = std::min(kForwardBlocks, m);
    parallel_blocks(blocks, [&](std::size_t b) {
        for (std::size_t i = b * m / blocks; i < (b + 1) * m / blocks; ++i) trace_uncached(i, per_ray[i]);
    });
    ray_start_.resize(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) ray_start_[i + 1] = ray_start_[i] + per_ray[i].size();
    seg_pixel_.reserve(ray_start_[m]);
    seg_length_.reserve(ray_start_[m]);
    for (const auto& segs : per_ray) {
        for (const auto& sg : segs) {
            seg_pixel_.push_back(static_cast<std::uint32_t>(sg.pixel));
            seg_length_.push_back(sg.length);
        }
    }
}

void RadonOperator::trace(std::size_t i, std::vector<Segment>& out) const {
    if (!cached()) {
        trace_uncached(i, out);
        return;
    }
    out.clear();
    for (std::size_t k = ray_start_[i]; k < ray_start_[i + 1]; ++k)
        out.push_back({seg_pixel_[k], seg_length_[k]});
}

void RadonOperator::trace_uncached(std::size_t i, std::vector<Segment>& out) const {
    out.clear();
    const std::size_t n = geometry_.n_side;
    const double E = geometry_.extent;
    const double h = geometry_.pixel_size();
    const std::size_t view = i / geometry_.rays_per_view;
    const double c = cos_[view];
    const double s = sin_[view];
    const double tau = geometry_.offset_of(i) * E;

    // Line: (px, py) + u (dx, dy), u the arc-length parameter.
    const double px = tau * c;
    const double py = tau * s;
    const double dx = -s;
    const double dy = c;

    double u0 = -std::numeric_limits<double>::infinity();
    double u1 = std::numeric_limits<double>::infinity();
    auto clip = [&](double p, double d) {
        if (std::abs(d) < kAxisEps) return p >= -E && p <= E;
        double a = (-E - p) / d;
        double b = (E - p) / d;
        if (a > b) std::swap(a, b);
        u0 = std::max(u0, a);
        u1 = std::min(u1, b);
        return true;
    };
    if (!clip(px, dx) || !clip(py, dy) || !(u1 > u0)) return;

    thread_local std::vector<double> ux, uy, knots;
    crossings(px, dx, E, h, n, u0, u1, ux);
    crossings(py, dy, E, h, n, u0, u1, uy);
    knots.clear();
    knots.push_back(u0);
    std::merge(ux.begin(), ux.end(), uy.begin(), uy.end(), std::back_inserter(knots));
    knots.push_back(u1);

    // An axis-parallel ray lying on a pixel edge is split evenly between the
    // two pixels sharing that edge (on the domain border, half goes nowhere).
    const long line_x = std::abs(dx) < kAxisEps ? grid_line(px, E, h, n) : -1;
    const long line_y = std::abs(dy) < kAxisEps ? grid_line(py, E, h, n) : -1;

    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double len = knots[k + 1] - knots[k];
        if (!(len > 0.0)) continue;
        const double mid = 0.5 * (knots[k] + knots[k + 1]);
        const std::size_t col = cell_of(px + mid * dx, E, h, n);
        const std::size_t row = cell_of(py + mid * dy, E, h, n);
        if (line_x >= 0) {
            const auto c = static_cast<std::size_t>(line_x);
            if (c > 0) out.push_back({row * n + c - 1, 0.5 * len});
            if (c < n) out.push_back({row * n + c, 0.5 * len});
        } else if (line_y >= 0) {
            const auto r = static_cast<std::size_t>(line_y);
            if (r > 0) out.push_back({(r - 1) * n + col, 0.5 * len});
            if (r < n) out.push_back({r * n + col, 0.5 * len});
        } else {
            out.push_back({row * n + col, len});
        }
    }
}

void RadonOperator::apply_into(ConstSpan x, MutSpan out) const {
    const std::size_t m = nrows();
    const std::size_t blocks = std::min(kForwardBlocks, m);
    parallel_blocks(blocks, [&](std::size_t b) {
        thread_local std::vector<Segment> segs;
        const std::size_t lo = b * m / blocks;
        const std::size_t hi = (b + 1) * m / blocks;
        for (std::size_t i = lo; i < hi; ++i) {
            double acc = 0.0;
            if (cached()) {
                for (std::size_t k = ray_start_[i]; k < ray_start_[i + 1]; ++k)
                    acc += seg_length_[k] * x[seg_pixel_[k]];
            } else {
                trace(i, segs);
                for (const auto& sg : segs) acc += sg.length * x[sg.pixel];
            }
            out[i] = acc;
        }
    });
}

void RadonOperator::apply_adjoint_into(ConstSpan y, MutSpan out) const {
    const std::size_t m = nrows();
    const std::size_t n = ncols();
    const std::size_t blocks = std::min(kAdjointBlocks, m);
    // Block 0 accumulates straight into out; the others into private buffers
    // merged afterwards in block order, so the sum order never depends on the
    // number of worker threads.
    std::vector<Vec> partial(blocks > 0 ? blocks - 1 : 0);
    parallel_blocks(blocks, [&](std::size_t b) {
        thread_local std::vector<Segment> segs;
        MutSpan acc = out;
        if (b > 0) {
            partial[b - 1].assign(n, 0.0);
            acc = partial[b - 1];
        }
        const std::size_t lo = b * m / blocks;
        const std::size_t hi = (b + 1) * m / blocks;
        for (std::size_t i = lo; i < hi; ++i) {
            const double yi = y[i];
            if (yi == 0.0) continue;
            if (cached()) {
                for (std::size_t k = ray_start_[i]; k < ray_start_[i + 1]; ++k)
                    acc[seg_pixel_[k]] += seg_length_[k] * yi;
                continue;
            }
            trace(i, segs);
            for (const auto& sg : segs) acc[sg.pixel] += sg.length * yi;
        }
    });
    for (const Vec& p : partial)
        for (std::size_t j = 0; j < n; ++j) out[j] += p[j];
}

SparseRow RadonOperator::row_unchecked(std::size_t i) const {
    std::vector<Segment> segs;
    trace(i, segs);
    std::sort(segs.begin(), segs.end(),
              [](const Segment& a, const Segment& b) { return a.pixel < b.pixel; });
    SparseRow row;
    for (const auto& sg : segs) {
        if (!row.indices.empty() && row.indices.back() == sg.pixel) {
            row.values.back() += sg.length;
        } else {
            row.indices.push_back(sg.pixel);
            row.values.push_back(sg.length);
        }
    }
    for (double v : row.values) row.squared_norm += v * v;
    return row;
}

} // namespace fpgm
