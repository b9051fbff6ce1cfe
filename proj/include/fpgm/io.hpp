#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpgm/phantom.hpp"
#include "fpgm/tv.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Flat binary array file. A short text header
///
///   FPGM-ARRAY 1
///   kind <word>
///   dims <d0> <d1> ...
///   channels <c>
///   extent <e>
///   grid <n>
///   seed <s>
///   end
///
/// is followed by prod(dims) * channels little-endian float64 values, channel
/// by channel, d0 varying fastest.
struct ArrayFile {
    std::string kind;
    std::vector<std::size_t> dims;
    std::size_t channels = 1;
    double extent = 1.0;
    std::size_t grid = 0; // image side a sinogram refers to (0 when not applicable)
    std::uint64_t seed = 0;
    Vec data;

    std::size_t count() const;
};

void write_array(const std::filesystem::path& path, const ArrayFile& a);
ArrayFile read_array(const std::filesystem::path& path);

/// One row of the image per line, top row first, 17 significant digits.
void write_image_csv(const std::filesystem::path& path, ConstSpan image, GridShape grid);

/// 8-bit binary PGM, values clamped to [low, high]; top row first.
void write_pgm(const std::filesystem::path& path, ConstSpan image, GridShape grid, double low,
               double high);

/// ROI pairs with their pixel lists, as JSON.
void write_roi_manifest(const std::filesystem::path& path, const std::vector<RoiPair>& pairs,
                        GridShape grid, std::uint64_t seed);
std::vector<RoiPair> read_roi_manifest(const std::filesystem::path& path);

} // namespace fpgm
