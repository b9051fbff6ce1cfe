#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Additive ellipse, axis-aligned or rotated by angle (radians).
struct EllipseFeature {
    double cx = 0.0;
    double cy = 0.0;
    double a = 1.0;
    double b = 1.0;
    double angle = 0.0;
    double value = 0.0;
};

/// A lesion that appears either at (cx, cy) or at its mirror (-cx, cy).
struct LesionSlot {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double delta = 0.0;
};

enum class LesionSides { random, left, right };

/// Seed-parameterized head phantom: a high-attenuation skull annulus around a
/// homogeneous interior, fixed additive features, paired lesions and a smooth
/// low-amplitude random inhomogeneity inside the skull.
struct PhantomSpec {
    std::size_t n_side = 128;
    double extent = 9.1; // cm, half-width of the square image domain

    double skull_cx = 0.0;
    double skull_cy = 0.0;
    double skull_inner_radius = 8.0;
    double skull_outer_radius = 8.8;
    double skull_value = 0.45;   // cm^-1
    double interior_value = 0.208; // cm^-1

    std::vector<EllipseFeature> features;
    std::vector<LesionSlot> lesions;

    double inhomogeneity = 0.0015; // maximum absolute amplitude
    int inhomogeneity_order = 3;   // cosine basis degree per axis
    LesionSides sides = LesionSides::random;
    int supersample = 3; // samples per pixel side when rasterizing

    static PhantomSpec desk_default();
};

/// Pixel sets of one lesion pair. Pixels belong to a region when their
/// centers lie inside the analytic disk.
struct RoiPair {
    std::vector<std::size_t> tumor;
    std::vector<std::size_t> control;
    double tumor_cx = 0.0;
    double tumor_cy = 0.0;
    double radius = 0.0;
    bool on_left = false;
};

struct Phantom {
    GridShape grid;
    double extent = 1.0;
    Vec image;
    std::vector<RoiPair> roi_pairs;
    std::uint64_t seed = 0;
};

/// Display window for lesion inspection dumps, in cm^-1.
inline constexpr double kLesionWindowLow = 0.204;
inline constexpr double kLesionWindowHigh = 0.21765;

/// Deterministic given (seed, spec). Throws ConfigError for inconsistent specs
/// (overlapping or axis-straddling lesion slots, slots outside the interior).
Phantom generate_phantom(std::uint64_t seed, const PhantomSpec& spec);

/// Value of the noise-free piecewise-constant composition at a point, with the
/// given lesion placement (one flag per slot, true = left) and no inhomogeneity.
double phantom_density(const PhantomSpec& spec, const std::vector<bool>& on_left, double x,
                       double y);

} // namespace fpgm
