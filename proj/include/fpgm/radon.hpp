#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpgm/linop.hpp"
#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Parallel-beam acquisition geometry over the square [-extent, extent]^2.
/// Ray i (0-based) belongs to view i / rays_per_view and has index
/// i % rays_per_view within it. Its angle is -pi * view / (views - 1) and its
/// normalized offset is -1 + 2 * ray / (rays_per_view - 1); the physical
/// offset is normalized offset * extent.
struct Geometry {
    std::size_t views = 0;
    std::size_t rays_per_view = 0;
    std::size_t n_side = 0;
    double extent = 1.0;
    Vec theta;  // per view
    Vec offset; // per ray within a view, normalized to [-1, 1]

    std::size_t rays() const { return views * rays_per_view; }
    GridShape grid() const { return GridShape::square(n_side); }
    double pixel_size() const { return 2.0 * extent / static_cast<double>(n_side); }
    double theta_of(std::size_t i) const { return theta[i / rays_per_view]; }
    double offset_of(std::size_t i) const { return offset[i % rays_per_view]; }
};

Geometry make_geometry(std::size_t views, std::size_t rays_per_view, std::size_t n_side,
                       double extent);

/// Ray-driven projector: each row holds the exact intersection lengths of one
/// line with the pixels it crosses (grid traversal between successive
/// pixel-boundary crossings). A ray running exactly along a pixel edge
/// contributes half its length to each of the two pixels sharing the edge.
class RadonOperator final : public LinearOperator {
public:
    /// Default budget for the segment cache (bytes).
    static constexpr std::size_t kDefaultCacheBytes = std::size_t{512} << 20;

    /// When the traced segments of all rays fit in cache_bytes they are traced
    /// once here and reused; otherwise each application retraces the rays.
    /// Both paths produce identical results.
    explicit RadonOperator(Geometry geometry, std::size_t cache_bytes = kDefaultCacheBytes);

    std::size_t nrows() const override { return geometry_.rays(); }
    std::size_t ncols() const override { return geometry_.grid().size(); }
    const Geometry& geometry() const { return geometry_; }

    struct Segment {
        std::size_t pixel;
        double length;
    };
    /// Pixel segments of ray i in traversal order (zero-length pieces dropped).
    /// Edge-aligned rays yield two half-length segments per step.
    void trace(std::size_t i, std::vector<Segment>& out) const;
    bool cached() const { return !ray_start_.empty(); }

protected:
    void apply_into(ConstSpan x, MutSpan out) const override;
    void apply_adjoint_into(ConstSpan y, MutSpan out) const override;
    SparseRow row_unchecked(std::size_t i) const override;

private:
    void trace_uncached(std::size_t i, std::vector<Segment>& out) const;

    Geometry geometry_;
    Vec cos_;
    Vec sin_;
    std::vector<std::size_t> ray_start_; // rays() + 1 offsets into the arrays below
    std::vector<std::uint32_t> seg_pixel_;
    Vec seg_length_;
};

} // namespace fpgm
