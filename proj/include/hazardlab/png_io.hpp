#pragma once

#include <filesystem>

#include "hazardlab/preprocess.hpp"

namespace hazardlab {

/// Reads an 8-bit PNG as gray or RGB (palette and 16-bit inputs are expanded,
/// alpha is dropped).
RasterImage read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& image);

}  // namespace hazardlab
