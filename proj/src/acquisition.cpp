#include "fpgm/acquisition.hpp"

#include <cmath>
#include <random>

namespace fpgm {

CountData simulate_counts(const RadonOperator& R, ConstSpan image, ConstSpan flat, ConstSpan dark,
                          std::uint64_t seed, bool noiseless) {
    const std::size_t m = R.nrows();
    require_size(flat, m, "simulate_counts: flat");
    require_size(dark, m, "simulate_counts: dark");
    for (std::size_t i = 0; i < m; ++i)
        if (!(dark[i] >= 0.0) || !(flat[i] > dark[i]))
            throw ContractError("simulate_counts: need flat > dark >= 0 at ray " +
                                std::to_string(i));

    const Vec s = R.apply(image);
    CountData out;
    out.flat.assign(flat.begin(), flat.end());
    out.dark.assign(dark.begin(), dark.end());
    out.geometry = R.geometry();
    out.seed = seed;
    out.p.resize(m);

    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const double mean = flat[i] * std::exp(-s[i]) + dark[i];
        if (noiseless) {
            out.p[i] = mean;
        } else {
            std::poisson_distribution<long long> draw(mean);
            out.p[i] = static_cast<double>(draw(rng));
        }
    }
    return out;
}

CountData simulate_counts(const RadonOperator& R, ConstSpan image, double flat, double dark,
                          std::uint64_t seed, bool noiseless) {
    const Vec f(R.nrows(), flat);
    const Vec d(R.nrows(), dark);
    return simulate_counts(R, image, f, d, seed, noiseless);
}

Vec estimate_sinogram(const CountData& counts) {
    const std::size_t m = counts.p.size();
    if (counts.flat.size() != m || counts.dark.size() != m)
        throw DataError("estimate_sinogram: counts, flat and dark differ in length");
    Vec b(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double open = counts.flat[i] - counts.dark[i];
        if (!(open > 0.0))
            throw DataError("estimate_sinogram: flat field not above dark field at ray " +
                            std::to_string(i));
        const double seen = std::max(counts.p[i] - counts.dark[i], 1.0);
        b[i] = std::log(open / seen);
    }
    return b;
}

Vec uniform_init(const LinearOperator& R, ConstSpan b) {
    require_size(b, R.nrows(), "uniform_init");
    const Vec ones(R.ncols(), 1.0);
    const double mass = sum(R.apply(ones));
    if (!(mass > 0.0)) throw DataError("uniform_init: projector has zero total mass");
    return Vec(R.ncols(), sum(b) / mass);
}

} // namespace fpgm
