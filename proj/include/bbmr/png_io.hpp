#pragma once

// 8-bit RGB PNG I/O via libpng's simplified API. Link against libpng.

#include <cstring>
#include <filesystem>
#include <string>

#include <png.h>

#include "bbmr/error.hpp"
#include "bbmr/image.hpp"

namespace bbmr {

/// Loads a PNG as 8-bit RGB. Alpha is dropped; 16-bit files are rejected.
inline RasterImage read_png(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) fail(ErrorCode::io, "no such file: " + path.string());
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str()))
        fail(ErrorCode::io, "cannot read PNG " + path.string() + ": " + img.message);
    if (img.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&img);
        fail(ErrorCode::invalid_argument, "16-bit PNG not supported: " + path.string());
    }
    if (img.width == 0 || img.height == 0) {
        png_image_free(&img);
        fail(ErrorCode::invalid_argument, "empty PNG: " + path.string());
    }
    // Stripping alpha, not compositing it: read RGBA, keep RGB.
    img.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, rgba.data(), 0, nullptr))
        fail(ErrorCode::io, "cannot decode PNG " + path.string() + ": " + img.message);
    RasterImage out(int(img.width), int(img.height));
    auto dst = out.bytes();
    for (std::size_t i = 0, n = out.pixel_count(); i < n; ++i) {
        dst[3 * i] = rgba[4 * i];
        dst[3 * i + 1] = rgba[4 * i + 1];
        dst[3 * i + 2] = rgba[4 * i + 2];
    }
    return out;
}

inline void write_png(const std::filesystem::path& path, const RasterImage& image) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = png_uint_32(image.width());
    img.height = png_uint_32(image.height());
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, image.bytes().data(), 0, nullptr))
        fail(ErrorCode::io, "cannot write PNG " + path.string() + ": " + img.message);
}

} // namespace bbmr
