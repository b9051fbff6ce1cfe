#include "fpgm/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace fpgm {

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool inside_ellipse(const EllipseFeature& e, double x, double y) {
    const double c = std::cos(e.angle);
    const double s = std::sin(e.angle);
    const double u = (x - e.cx) * c + (y - e.cy) * s;
    const double v = -(x - e.cx) * s + (y - e.cy) * c;
    return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
}

double sq(double v) { return v * v; }

void validate(const PhantomSpec& spec) {
    if (spec.n_side < 1) throw ConfigError("phantom: n_side must be positive");
    if (!(spec.extent > 0.0)) throw ConfigError("phantom: extent must be positive");
    if (!(spec.skull_inner_radius > 0.0) || !(spec.skull_outer_radius > spec.skull_inner_radius))
        throw ConfigError("phantom: need 0 < skull_inner_radius < skull_outer_radius");
    if (spec.supersample < 1) throw ConfigError("phantom: supersample must be positive");
    if (spec.inhomogeneity_order < 0) throw ConfigError("phantom: inhomogeneity_order must be >= 0");
    if (!(spec.inhomogeneity >= 0.0)) throw ConfigError("phantom: inhomogeneity must be >= 0");
    for (const auto& e : spec.features)
        if (!(e.a > 0.0) || !(e.b > 0.0)) throw ConfigError("phantom: feature semi-axes must be positive");

    const auto& L = spec.lesions;
    for (std::size_t i = 0; i < L.size(); ++i) {
        const auto& s = L[i];
        const std::string tag = "phantom: lesion slot " + std::to_string(i);
        if (!(s.radius > 0.0)) throw ConfigError(tag + " has nonpositive radius");
        if (!(std::abs(s.cx) > s.radius))
            throw ConfigError(tag + " straddles the central vertical axis");
        for (double x : {s.cx, -s.cx}) {
            const double r = std::hypot(x - spec.skull_cx, s.cy - spec.skull_cy);
            if (r + s.radius > spec.skull_inner_radius)
                throw ConfigError(tag + " extends outside the skull interior");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = L[j];
            for (double xi : {s.cx, -s.cx})
                for (double xj : {o.cx, -o.cx})
                    if (std::hypot(xi - xj, s.cy - o.cy) < s.radius + o.radius)
                        throw ConfigError(tag + " overlaps lesion slot " + std::to_string(j));
        }
    }
}

} // namespace

PhantomSpec PhantomSpec::desk_default() {
    PhantomSpec s;
    s.features = {
        {0.0, 2.5, 1.0, 2.2, 0.0, -0.006},
        {0.0, -4.5, 2.4, 1.2, 0.0, 0.004},
    };
    const double r = 0.45;
    const double delta = 0.0075;
    s.lesions = {
        {2.2, 5.8, r, delta},  {4.3, 4.9, r, delta},  {6.0, 3.0, r, delta},
        {6.8, 0.6, r, delta},  {6.2, -2.2, r, delta}, {4.6, -5.6, r, delta},
        {2.2, 2.0, r, delta},  {3.8, 0.2, r, delta},  {2.4, -1.8, r, delta},
        {4.0, -3.2, r, delta},
    };
    return s;
}

double phantom_density(const PhantomSpec& spec, const std::vector<bool>& on_left, double x,
                       double y) {
    const double r2 = sq(x - spec.skull_cx) + sq(y - spec.skull_cy);
    if (r2 > sq(spec.skull_outer_radius)) return 0.0;
    if (r2 > sq(spec.skull_inner_radius)) return spec.skull_value;
    double v = spec.interior_value;
    for (const auto& e : spec.features)
        if (inside_ellipse(e, x, y)) v += e.value;
    for (std::size_t s = 0; s < spec.lesions.size(); ++s) {
        const auto& slot = spec.lesions[s];
        const double cx = on_left[s] ? -std::abs(slot.cx) : std::abs(slot.cx);
        if (sq(x - cx) + sq(y - slot.cy) <= sq(slot.radius)) v += slot.delta;
    }
    return v;
}

Phantom generate_phantom(std::uint64_t seed, const PhantomSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(seed);

    const std::size_t S = spec.lesions.size();
    std::vector<bool> on_left(S);
    for (std::size_t s = 0; s < S; ++s) {
        const bool coin = (rng() >> 63) != 0;
        switch (spec.sides) {
        case LesionSides::random: on_left[s] = coin; break;
        case LesionSides::left: on_left[s] = true; break;
        case LesionSides::right: on_left[s] = false; break;
        }
    }

    const int order = spec.inhomogeneity_order;
    const std::size_t n_terms = static_cast<std::size_t>((order + 1) * (order + 1));
    Vec coeff(n_terms, 0.0);
    for (std::size_t k = 1; k < n_terms; ++k) coeff[k] = 2.0 * unit_uniform(rng) - 1.0;
    // Each basis function is bounded by 1, so dividing by sum |c_k| keeps the
    // field within the configured amplitude.
    double coeff_l1 = 0.0;
    for (double c : coeff) coeff_l1 += std::abs(c);
    const double coeff_scale = coeff_l1 > 0.0 ? spec.inhomogeneity / coeff_l1 : 0.0;

    const double E = spec.extent;
    auto inhomogeneity = [&](double x, double y) {
        if (coeff_scale == 0.0) return 0.0;
        double v = 0.0;
        for (int a = 0; a <= order; ++a) {
            const double ca = std::cos(a * std::numbers::pi * (x / E + 1.0) / 2.0);
            for (int b = 0; b <= order; ++b) {
                const std::size_t k = static_cast<std::size_t>(a * (order + 1) + b);
                if (k == 0) continue;
                v += coeff[k] * ca * std::cos(b * std::numbers::pi * (y / E + 1.0) / 2.0);
            }
        }
        return coeff_scale * v;
    };

    Phantom ph;
    ph.grid = GridShape::square(spec.n_side);
    ph.extent = E;
    ph.seed = seed;
    ph.image.assign(ph.grid.size(), 0.0);

    const std::size_t n = spec.n_side;
    const double h = 2.0 * E / static_cast<double>(n);
    const int ss = spec.supersample;
    const double inner2 = sq(spec.skull_inner_radius);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t col = 0; col < n; ++col) {
            double acc = 0.0;
            for (int sy = 0; sy < ss; ++sy) {
                const double y = -E + (static_cast<double>(row) + (sy + 0.5) / ss) * h;
                for (int sx = 0; sx < ss; ++sx) {
                    const double x = -E + (static_cast<double>(col) + (sx + 0.5) / ss) * h;
                    double v = phantom_density(spec, on_left, x, y);
                    if (sq(x - spec.skull_cx) + sq(y - spec.skull_cy) <= inner2)
                        v += inhomogeneity(x, y);
                    acc += v;
                }
            }
            ph.image[row * n + col] = acc / static_cast<double>(ss * ss);
        }
    }

    for (std::size_t s = 0; s < S; ++s) {
        const auto& slot = spec.lesions[s];
        RoiPair pair;
        pair.on_left = on_left[s];
        pair.tumor_cx = on_left[s] ? -std::abs(slot.cx) : std::abs(slot.cx);
        pair.tumor_cy = slot.cy;
        pair.radius = slot.radius;
        for (std::size_t row = 0; row < n; ++row) {
            const double y = -E + (static_cast<double>(row) + 0.5) * h;
            for (std::size_t col = 0; col < n; ++col) {
                const double x = -E + (static_cast<double>(col) + 0.5) * h;
                const double r2 = sq(slot.radius);
                if (sq(x - pair.tumor_cx) + sq(y - slot.cy) <= r2)
                    pair.tumor.push_back(row * n + col);
                if (sq(x + pair.tumor_cx) + sq(y - slot.cy) <= r2)
                    pair.control.push_back(row * n + col);
            }
        }
        ph.roi_pairs.push_back(std::move(pair));
    }
    return ph;
}

} // namespace fpgm
