#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <vector>

#include "bbmr/error.hpp"
#include "bbmr/image.hpp"
#include "bbmr/metrics.hpp"

namespace bbmr {

/// Full-resolution blocks laid out on the padded grid.
struct StitchCanvas {
    RasterImage raster;
    BlockGrid grid;
};

inline StitchCanvas stitch(std::span<const RasterImage> sr_blocks, const BlockGrid& grid) {
    require(sr_blocks.size() == grid.size(),
            "stitch: expected " + std::to_string(grid.size()) + " blocks, got " + std::to_string(sr_blocks.size()));
    StitchCanvas canvas{RasterImage(grid.padded_w, grid.padded_h), grid};
    for (std::size_t i = 0; i < sr_blocks.size(); ++i) place_block(canvas.raster, grid, i, sr_blocks[i]);
    return canvas;
}

enum class SeamAxis { vertical, horizontal };

/// Filtered pixels for one strip of width 2r straddling an internal boundary.
/// A vertical seam at column `boundary` covers columns [boundary - r,
/// boundary + r) over the full canvas height.
struct Strip {
    SeamAxis axis = SeamAxis::vertical;
    int boundary = 0;
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    std::vector<std::uint8_t> pixels;
    std::vector<double> strength;  // one per block-length segment
};

struct SeamStrips {
    int radius = 0;
    std::vector<Strip> strips;  // vertical seams first, then horizontal
};

// 5-tap binomial low-pass.
inline constexpr std::array<int, 5> kBinomial5{1, 4, 6, 4, 1};

struct SeamOptions {
    // Texture masking: a seam segment whose interior activity (mean |luma
    // second difference| three pixels into each block) is at most
    // `activity_lo` is filtered fully, at least `activity_hi` not at all,
    // linearly in between. gated = false filters every segment fully.
    bool gated = true;
    double activity_lo = 1.0;
    double activity_hi = 2.5;
};

namespace detail {

// Strength for one seam segment. `line(j, d)` returns luma at offset d from
// the cut (d = -1 is the last pixel before it) on line j of the segment.
template <class Line>
double segment_strength(int length, Line&& line, const SeamOptions& opt) {
    if (!opt.gated) return 1.0;
    double inner = 0.0;
    for (int j = 0; j < length; ++j) {
        auto sd = [&](int d) { return std::abs(line(j, d - 1) - 2.0 * line(j, d) + line(j, d + 1)); };
        inner += sd(-3) + sd(2);
    }
    inner /= 2.0 * length;
    if (inner <= opt.activity_lo) return 1.0;
    if (inner >= opt.activity_hi) return 0.0;
    return (opt.activity_hi - inner) / (opt.activity_hi - opt.activity_lo);
}

inline std::uint8_t blend(std::uint8_t in, int acc16, double strength) {
    if (strength >= 1.0) return std::uint8_t((acc16 + 8) / 16);
    const double v = in + strength * (acc16 / 16.0 - in);
    return std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace detail

/// Low-passes across every internal block boundary. Vertical seams are
/// filtered horizontally from the canvas; horizontal seams are then filtered
/// vertically from the result, so strip intersections see both passes. Each
/// block-length segment of a seam is blended towards the filtered values by
/// a strength that fades out as the neighbouring texture gets busier.
inline SeamStrips seam_filter(const StitchCanvas& canvas, int r, const SeamOptions& options = {}) {
    const auto& g = canvas.grid;
    require(r >= 1, "seam_filter: radius must be at least 1");
    require(2 * r < std::min(g.block_w, g.block_h), "seam_filter: radius too large for block size");
    require(std::min(g.block_w, g.block_h) >= 8, "seam_filter: blocks must be at least 8 pixels");
    const auto& src = canvas.raster;
    require(src.width() == g.padded_w && src.height() == g.padded_h, "seam_filter: canvas does not match grid");
    constexpr int C = RasterImage::channels;
    const int W = src.width();
    const int H = src.height();

    SeamStrips out{r, {}};
    RasterImage pass1 = src;
    for (int col = 1; col < g.cols; ++col) {
        Strip s{SeamAxis::vertical, col * g.block_w, col * g.block_w - r, 0, 2 * r, H, {}, {}};
        s.pixels.resize(std::size_t(s.w) * std::size_t(s.h) * C);
        for (int row = 0; row < g.rows; ++row) {
            const int y0 = row * g.block_h;
            const double strength = detail::segment_strength(
                g.block_h,
                [&](int j, int d) {
                    const int x = s.boundary + d;
                    return luma(src.at(x, y0 + j, 0), src.at(x, y0 + j, 1), src.at(x, y0 + j, 2));
                },
                options);
            s.strength.push_back(strength);
            for (int y = y0; y < y0 + g.block_h; ++y)
                for (int dx = 0; dx < s.w; ++dx)
                    for (int c = 0; c < C; ++c) {
                        int acc = 0;
                        for (int t = -2; t <= 2; ++t)
                            acc += kBinomial5[std::size_t(t + 2)] *
                                   src.at(std::clamp(s.x + dx + t, 0, W - 1), y, c);
                        const auto v = detail::blend(src.at(s.x + dx, y, c), acc, strength);
                        s.pixels[(std::size_t(y) * std::size_t(s.w) + std::size_t(dx)) * C + std::size_t(c)] = v;
                        pass1.at(s.x + dx, y, c) = v;
                    }
        }
        out.strips.push_back(std::move(s));
    }
    for (int row = 1; row < g.rows; ++row) {
        Strip s{SeamAxis::horizontal, row * g.block_h, 0, row * g.block_h - r, W, 2 * r, {}, {}};
        s.pixels.resize(std::size_t(s.w) * std::size_t(s.h) * C);
        for (int col = 0; col < g.cols; ++col) {
            const int x0 = col * g.block_w;
            const double strength = detail::segment_strength(
                g.block_w,
                [&](int j, int d) {
                    const int y = s.boundary + d;
                    return luma(pass1.at(x0 + j, y, 0), pass1.at(x0 + j, y, 1), pass1.at(x0 + j, y, 2));
                },
                options);
            s.strength.push_back(strength);
            for (int dy = 0; dy < s.h; ++dy)
                for (int x = x0; x < x0 + g.block_w; ++x)
                    for (int c = 0; c < C; ++c) {
                        int acc = 0;
                        for (int t = -2; t <= 2; ++t)
                            acc += kBinomial5[std::size_t(t + 2)] *
                                   pass1.at(x, std::clamp(s.y + dy + t, 0, H - 1), c);
                        s.pixels[(std::size_t(dy) * std::size_t(s.w) + std::size_t(x)) * C + std::size_t(c)] =
                            detail::blend(pass1.at(x, s.y + dy, c), acc, strength);
                    }
        }
        out.strips.push_back(std::move(s));
    }
    return out;
}

/// Overwrites the strip rectangles and crops to the original image size.
inline RasterImage edge_replace(const StitchCanvas& canvas, const SeamStrips& strips) {
    RasterImage out = canvas.raster;
    constexpr int C = RasterImage::channels;
    for (const auto& s : strips.strips) {
        require(s.x >= 0 && s.y >= 0 && s.x + s.w <= out.width() && s.y + s.h <= out.height(),
                "edge_replace: strip outside canvas");
        for (int y = 0; y < s.h; ++y)
            for (int x = 0; x < s.w; ++x)
                for (int c = 0; c < C; ++c)
                    out.at(s.x + x, s.y + y, c) =
                        s.pixels[(std::size_t(y) * std::size_t(s.w) + std::size_t(x)) * C + std::size_t(c)];
    }
    return crop(out, canvas.grid.orig_w, canvas.grid.orig_h);
}

namespace detail {

struct SecondDiffStats {
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v) {
        sum += std::abs(v);
        ++count;
    }
    double mean() const { return count ? sum / double(count) : 0.0; }
};

// |second difference| straddling the cut between columns b-1 and b, taken at
// both b-1 and b, across every row.
inline void accumulate_vertical_cut(const LumaPlane& l, int b, SecondDiffStats& st) {
    if (b < 2 || b + 1 >= l.width) return;
    for (int y = 0; y < l.height; ++y) {
        st.add(l.at(b - 2, y) - 2.0 * l.at(b - 1, y) + l.at(b, y));
        st.add(l.at(b - 1, y) - 2.0 * l.at(b, y) + l.at(b + 1, y));
    }
}

inline void accumulate_horizontal_cut(const LumaPlane& l, int b, SecondDiffStats& st) {
    if (b < 2 || b + 1 >= l.height) return;
    for (int x = 0; x < l.width; ++x) {
        st.add(l.at(x, b - 2) - 2.0 * l.at(x, b - 1) + l.at(x, b));
        st.add(l.at(x, b - 1) - 2.0 * l.at(x, b) + l.at(x, b + 1));
    }
}

} // namespace detail

/// Ratio of mean |luma second difference| at internal block boundaries to the
/// same statistic half a block before each boundary. 1.0 means the seams look
/// like the interior; larger means visible blocking.
inline double seam_index(const RasterImage& image, const BlockGrid& grid) {
    const auto l = to_luma(image);
    detail::SecondDiffStats seam;
    detail::SecondDiffStats control;
    for (int col = 1; col < grid.cols; ++col) {
        const int b = col * grid.block_w;
        if (b + 1 >= l.width) continue;
        detail::accumulate_vertical_cut(l, b, seam);
        detail::accumulate_vertical_cut(l, b - grid.block_w / 2, control);
    }
    for (int row = 1; row < grid.rows; ++row) {
        const int b = row * grid.block_h;
        if (b + 1 >= l.height) continue;
        detail::accumulate_horizontal_cut(l, b, seam);
        detail::accumulate_horizontal_cut(l, b - grid.block_h / 2, control);
    }
    if (seam.count == 0 || control.mean() == 0.0) return 1.0;
    return seam.mean() / control.mean();
}

} // namespace bbmr
