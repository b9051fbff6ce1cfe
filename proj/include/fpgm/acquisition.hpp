#pragma once

#include <cstdint>

#include "fpgm/linop.hpp"
#include "fpgm/radon.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Transmission measurement: photon counts p, flat field (source, no object)
/// and dark field (no source), one entry per ray.
struct CountData {
    Vec p;
    Vec flat;
    Vec dark;
    Geometry geometry;
    std::uint64_t seed = 0;
};

/// Draws p_i ~ Poisson(flat_i exp(-(R x)_i) + dark_i) from a generator seeded
/// with seed, in ray order. With noiseless set, p_i is the mean itself.
/// Requires flat > dark >= 0 per ray.
CountData simulate_counts(const RadonOperator& R, ConstSpan image, ConstSpan flat, ConstSpan dark,
                          std::uint64_t seed, bool noiseless = false);

/// Convenience overload for scalar flat and dark fields.
CountData simulate_counts(const RadonOperator& R, ConstSpan image, double flat, double dark,
                          std::uint64_t seed, bool noiseless = false);

/// b_i = ln((flat_i - dark_i) / (p_i - dark_i)) with p_i - dark_i clamped to at
/// least one count. Throws DataError if flat_i <= dark_i.
Vec estimate_sinogram(const CountData& counts);

/// x0 = c 1 with c = sum(b) / sum(R 1). Throws DataError when R 1 sums to zero.
Vec uniform_init(const LinearOperator& R, ConstSpan b);

} // namespace fpgm
