#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "colier/raster/image.hpp"

namespace colier::raster {

/// Decodes any PNG to 8-bit RGBA. Throws IoError.
RasterImage read_png(const std::filesystem::path& path);
RasterImage decode_png(std::string_view bytes);

/// 8-bit RGBA PNG. Throws IoError.
void write_png(const RasterImage& img, const std::filesystem::path& path);
std::string encode_png(const RasterImage& img);

}  // namespace colier::raster
