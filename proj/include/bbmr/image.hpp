#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bbmr/error.hpp"

namespace bbmr {

/// 8-bit interleaved RGB raster, row-major.
class RasterImage {
public:
    static constexpr int channels = 3;

    RasterImage() = default;

    RasterImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height) {
        require(width >= 1 && height >= 1, "image dimensions must be positive");
        data_.assign(std::size_t(width) * std::size_t(height) * channels, fill);
    }

    RasterImage(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        require(width >= 1 && height >= 1, "image dimensions must be positive");
        require(data_.size() == std::size_t(width) * std::size_t(height) * channels,
                "image data length must equal width * height * 3");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return std::size_t(width_) * std::size_t(height_); }

    std::span<const std::uint8_t> bytes() const noexcept { return data_; }
    std::span<std::uint8_t> bytes() noexcept { return data_; }

    std::uint8_t at(int x, int y, int c) const noexcept {
        return data_[(std::size_t(y) * std::size_t(width_) + std::size_t(x)) * channels + std::size_t(c)];
    }
    std::uint8_t& at(int x, int y, int c) noexcept {
        return data_[(std::size_t(y) * std::size_t(width_) + std::size_t(x)) * channels + std::size_t(c)];
    }

    std::span<const std::uint8_t> row(int y) const noexcept {
        return std::span(data_).subspan(std::size_t(y) * std::size_t(width_) * channels,
                                        std::size_t(width_) * channels);
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Real-valued luma samples, row-major.
struct LumaPlane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    double at(int x, int y) const noexcept {
        return data[std::size_t(y) * std::size_t(width) + std::size_t(x)];
    }
};

/// Row-major partition of a (padded) image into equally sized blocks.
struct BlockGrid {
    int cols = 0;
    int rows = 0;
    int block_w = 0;
    int block_h = 0;
    int padded_w = 0;
    int padded_h = 0;
    int orig_w = 0;
    int orig_h = 0;

    std::size_t size() const noexcept { return std::size_t(cols) * std::size_t(rows); }
    int col_of(std::size_t i) const noexcept { return int(i % std::size_t(cols)); }
    int row_of(std::size_t i) const noexcept { return int(i / std::size_t(cols)); }
    int x0(std::size_t i) const noexcept { return col_of(i) * block_w; }
    int y0(std::size_t i) const noexcept { return row_of(i) * block_h; }
    bool padded() const noexcept { return padded_w != orig_w || padded_h != orig_h; }

    friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

inline BlockGrid make_grid(int orig_w, int orig_h, int block_w, int block_h) {
    require(orig_w >= 1 && orig_h >= 1, "cannot partition a zero-sized image");
    require(block_w >= 1 && block_h >= 1, "block dimensions must be positive");
    BlockGrid g;
    g.block_w = block_w;
    g.block_h = block_h;
    g.orig_w = orig_w;
    g.orig_h = orig_h;
    g.cols = (orig_w + block_w - 1) / block_w;
    g.rows = (orig_h + block_h - 1) / block_h;
    g.padded_w = g.cols * block_w;
    g.padded_h = g.rows * block_h;
    return g;
}

/// Lays a block grid over `image`. Blocks must be divisible by the coarsest
/// factor so that every low-resolution block has integer dimensions.
inline BlockGrid partition(const RasterImage& image, int block_h, int block_w, int k3) {
    require(!image.empty(), "cannot partition a zero-sized image");
    require(k3 >= 1, "scale factor must be positive");
    require(block_h >= k3 && block_w >= k3, "block dimensions must be at least k3");
    require(block_h % k3 == 0 && block_w % k3 == 0,
            "block dimensions must be divisible by k3 (" + std::to_string(k3) + ")");
    return make_grid(image.width(), image.height(), block_w, block_h);
}

/// Mirror padding on the right and bottom edges; the edge pixel is not repeated.
inline RasterImage pad_reflect(const RasterImage& image, int target_w, int target_h) {
    const int w = image.width();
    const int h = image.height();
    require(target_w >= w && target_h >= h, "padding target smaller than image");
    require(target_w - w < w && target_h - h < h,
            "padding exceeds reflectable range");
    if (target_w == w && target_h == h) return image;

    RasterImage out(target_w, target_h);
    auto reflect = [](int i, int n) { return i < n ? i : 2 * (n - 1) - i; };
    for (int y = 0; y < target_h; ++y) {
        const int sy = reflect(y, h);
        for (int x = 0; x < target_w; ++x) {
            const int sx = reflect(x, w);
            for (int c = 0; c < RasterImage::channels; ++c) out.at(x, y, c) = image.at(sx, sy, c);
        }
    }
    return out;
}

/// Copies block `i` out of an image that already has the grid's padded dims.
inline RasterImage extract_block(const RasterImage& image, const BlockGrid& grid, std::size_t i) {
    require(i < grid.size(), "block index out of range");
    require(image.width() == grid.padded_w && image.height() == grid.padded_h,
            "image dimensions must equal the grid's padded dimensions");
    RasterImage block(grid.block_w, grid.block_h);
    const int x0 = grid.x0(i);
    const int y0 = grid.y0(i);
    const std::size_t row_bytes = std::size_t(grid.block_w) * RasterImage::channels;
    for (int y = 0; y < grid.block_h; ++y) {
        auto src = image.row(y0 + y).subspan(std::size_t(x0) * RasterImage::channels, row_bytes);
        std::copy(src.begin(), src.end(),
                  block.bytes().begin() + std::ptrdiff_t(std::size_t(y) * row_bytes));
    }
    return block;
}

inline void place_block(RasterImage& canvas, const BlockGrid& grid, std::size_t i,
                        const RasterImage& block) {
    require(i < grid.size(), "block index out of range");
    require(block.width() == grid.block_w && block.height() == grid.block_h,
            "block dimensions do not match the grid");
    const int x0 = grid.x0(i);
    const int y0 = grid.y0(i);
    for (int y = 0; y < grid.block_h; ++y)
        for (int x = 0; x < grid.block_w; ++x)
            for (int c = 0; c < RasterImage::channels; ++c)
                canvas.at(x0 + x, y0 + y, c) = block.at(x, y, c);
}

inline std::vector<RasterImage> extract_all(const RasterImage& padded, const BlockGrid& grid) {
    std::vector<RasterImage> blocks;
    blocks.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) blocks.push_back(extract_block(padded, grid, i));
    return blocks;
}

inline RasterImage crop(const RasterImage& image, int w, int h) {
    require(w >= 1 && h >= 1 && w <= image.width() && h <= image.height(), "crop out of range");
    if (w == image.width() && h == image.height()) return image;
    RasterImage out(w, h);
    const std::size_t row_bytes = std::size_t(w) * RasterImage::channels;
    for (int y = 0; y < h; ++y) {
        auto src = image.row(y).first(row_bytes);
        std::copy(src.begin(), src.end(),
                  out.bytes().begin() + std::ptrdiff_t(std::size_t(y) * row_bytes));
    }
    return out;
}

// Full-range BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return kLumaR * r + kLumaG * g + kLumaB * b;
}

inline LumaPlane to_luma(const RasterImage& image) {
    LumaPlane plane{image.width(), image.height(), {}};
    plane.data.resize(image.pixel_count());
    auto px = image.bytes();
    for (std::size_t i = 0; i < plane.data.size(); ++i)
        plane.data[i] = luma(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
    return plane;
}

} // namespace bbmr
