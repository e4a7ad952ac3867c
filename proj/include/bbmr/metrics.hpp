#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bbmr/error.hpp"
#include "bbmr/image.hpp"

namespace bbmr {

/// PSNR reported for a lossless reconstruction (MSE of zero).
inline constexpr double kPsnrCap = 100.0;

enum class ChannelMode { luma, rgb };

struct PsnrResult {
    double value = kPsnrCap;
    double mse = 0.0;
    ChannelMode channel_mode = ChannelMode::luma;
};

inline double psnr_from_mse(double mse) {
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

inline double mse(const LumaPlane& a, const LumaPlane& b) {
    require(a.width == b.width && a.height == b.height, "luma plane dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / double(a.data.size());
}

inline PsnrResult psnr(const RasterImage& a, const RasterImage& b, ChannelMode mode = ChannelMode::luma) {
    require(a.width() == b.width() && a.height() == b.height(),
            "psnr: image dimension mismatch");
    double m = 0.0;
    if (mode == ChannelMode::luma) {
        m = mse(to_luma(a), to_luma(b));
    } else {
        auto pa = a.bytes();
        auto pb = b.bytes();
        double acc = 0.0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const double d = double(pa[i]) - double(pb[i]);
            acc += d * d;
        }
        m = acc / double(pa.size());
    }
    return {psnr_from_mse(m), m, mode};
}

/// Per-block luma PSNR of `reconstructed` against `reference`. Both images are
/// cropped to the grid's original extent; the padded margin never counts.
inline std::vector<double> psnr_block_table(const RasterImage& reference, const BlockGrid& grid,
                                            const RasterImage& reconstructed) {
    require(reference.width() == reconstructed.width() && reference.height() == reconstructed.height(),
            "psnr_block_table: image dimension mismatch");
    require(reference.width() >= grid.orig_w && reference.height() >= grid.orig_h,
            "psnr_block_table: image smaller than grid");
    const auto la = to_luma(reference);
    const auto lb = to_luma(reconstructed);
    std::vector<double> table(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int x0 = grid.x0(i);
        const int y0 = grid.y0(i);
        const int x1 = std::min(x0 + grid.block_w, grid.orig_w);
        const int y1 = std::min(y0 + grid.block_h, grid.orig_h);
        double acc = 0.0;
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                const double d = la.at(x, y) - lb.at(x, y);
                acc += d * d;
            }
        table[i] = psnr_from_mse(acc / double((x1 - x0) * (y1 - y0)));
    }
    return table;
}

} // namespace bbmr
