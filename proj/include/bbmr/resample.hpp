#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "bbmr/error.hpp"
#include "bbmr/image.hpp"

namespace bbmr {

enum class KernelName { bicubic, lanczos3, box, bilinear };

struct Kernel {
    KernelName name = KernelName::bicubic;
    double support = 2.0;

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

// Keys cubic convolution parameter.
inline constexpr double kCubicA = -0.5;

inline Kernel make_kernel(KernelName name) {
    switch (name) {
    case KernelName::bicubic: return {name, 2.0};
    case KernelName::lanczos3: return {name, 3.0};
    case KernelName::box: return {name, 0.5};
    case KernelName::bilinear: return {name, 1.0};
    }
    fail(ErrorCode::invalid_argument, "unknown kernel");
}

inline std::string_view kernel_name(KernelName name) {
    switch (name) {
    case KernelName::bicubic: return "bicubic";
    case KernelName::lanczos3: return "lanczos3";
    case KernelName::box: return "box";
    case KernelName::bilinear: return "bilinear";
    }
    return "?";
}

inline KernelName parse_kernel_name(std::string_view s) {
    for (auto k : {KernelName::bicubic, KernelName::lanczos3, KernelName::box, KernelName::bilinear})
        if (kernel_name(k) == s) return k;
    fail(ErrorCode::invalid_argument, "unknown kernel: " + std::string(s));
}

namespace detail {

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace detail

/// Evaluates the kernel at offset `x` (in source pixels). Even, zero outside
/// the support.
inline double kernel_weight(const Kernel& kernel, double x) {
    const double ax = std::abs(x);
    if (ax >= kernel.support) return 0.0;
    switch (kernel.name) {
    case KernelName::bicubic: {
        constexpr double a = kCubicA;
        if (ax <= 1.0) return ((a + 2.0) * ax - (a + 3.0)) * ax * ax + 1.0;
        return ((a * ax - 5.0 * a) * ax + 8.0 * a) * ax - 4.0 * a;
    }
    case KernelName::lanczos3:
        return detail::sinc(ax) * detail::sinc(ax / 3.0);
    case KernelName::box:
        return 1.0;
    case KernelName::bilinear:
        return 1.0 - ax;
    }
    return 0.0;
}

enum class ScalerRole { final, proxy };

/// A configured classical resampler. The proxy role marks a cheap scaler used
/// only to score candidate scales; the final role produces stored and
/// reconstructed pixels.
struct Scaler {
    Kernel kernel;
    ScalerRole role = ScalerRole::final;

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

inline Scaler make_scaler(std::string_view kernel, ScalerRole role) {
    return Scaler{make_kernel(parse_kernel_name(kernel)), role};
}

namespace detail {

// Normalized taps for one output sample. Source indices are clamped to the
// edge; taps are stored in increasing source-offset order.
struct Taps {
    std::vector<int> index;
    std::vector<double> weight;
};

// Source coordinate convention: src = (dst + 0.5) * scale - 0.5, where scale
// is source pixels per destination pixel. `stretch` widens the kernel for
// anti-aliased minification.
inline std::vector<Taps> make_taps(const Kernel& kernel, int src_len, int dst_len, double scale,
                                   double stretch) {
    std::vector<Taps> taps(static_cast<std::size_t>(dst_len));
    const double reach = kernel.support * stretch;
    for (int j = 0; j < dst_len; ++j) {
        const double center = (j + 0.5) * scale - 0.5;
        const int lo = int(std::floor(center - reach));
        const int hi = int(std::ceil(center + reach));
        auto& t = taps[std::size_t(j)];
        for (int i = lo; i <= hi; ++i) {
            const double w = kernel_weight(kernel, (i - center) / stretch);
            if (w == 0.0) continue;
            t.index.push_back(std::clamp(i, 0, src_len - 1));
            t.weight.push_back(w);
        }
        // Sum pairwise from both ends so mirrored inputs see identical
        // floating-point reductions.
        double total = 0.0;
        const std::size_t n = t.weight.size();
        for (std::size_t a = 0, b = n; a < b;) {
            --b;
            total += a == b ? t.weight[a] : t.weight[a] + t.weight[b];
            ++a;
        }
        for (auto& w : t.weight) w /= total;
    }
    return taps;
}

template <class Get>
inline double apply_taps(const Taps& t, Get&& get) {
    double acc = 0.0;
    const std::size_t n = t.weight.size();
    for (std::size_t a = 0, b = n; a < b;) {
        --b;
        if (a == b)
            acc += t.weight[a] * get(t.index[a]);
        else
            acc += t.weight[a] * get(t.index[a]) + t.weight[b] * get(t.index[b]);
        ++a;
    }
    return acc;
}

inline std::uint8_t quantize(double v) {
    return std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
}

inline RasterImage resample(const RasterImage& src, int dst_w, int dst_h, double scale_x,
                            double scale_y, double stretch_x, double stretch_y, const Kernel& kernel) {
    const int sw = src.width();
    const int sh = src.height();
    const auto htaps = make_taps(kernel, sw, dst_w, scale_x, stretch_x);
    const auto vtaps = make_taps(kernel, sh, dst_h, scale_y, stretch_y);
    constexpr int C = RasterImage::channels;

    // Horizontal pass into a float buffer of dst_w x sh.
    std::vector<double> tmp(std::size_t(dst_w) * std::size_t(sh) * C);
    for (int y = 0; y < sh; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            for (int c = 0; c < C; ++c) {
                tmp[(std::size_t(y) * std::size_t(dst_w) + std::size_t(x)) * C + std::size_t(c)] =
                    apply_taps(htaps[std::size_t(x)], [&](int i) { return double(src.at(i, y, c)); });
            }
        }
    }
    RasterImage out(dst_w, dst_h);
    for (int y = 0; y < dst_h; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            for (int c = 0; c < C; ++c) {
                out.at(x, y, c) = quantize(apply_taps(vtaps[std::size_t(y)], [&](int i) {
                    return tmp[(std::size_t(i) * std::size_t(dst_w) + std::size_t(x)) * C + std::size_t(c)];
                }));
            }
        }
    }
    return out;
}

} // namespace detail

/// Anti-aliased integer-factor minification.
inline RasterImage downscale(const RasterImage& block, int k, const Scaler& scaler) {
    require(k >= 1, "scale factor must be positive");
    require(block.width() % k == 0 && block.height() % k == 0,
            "block dimensions must be divisible by the scale factor " + std::to_string(k));
    if (k == 1) return block;
    const double s = double(k);
    return detail::resample(block, block.width() / k, block.height() / k, s, s, s, s, scaler.kernel);
}

/// Integer-factor magnification (interpolation, no kernel stretch).
inline RasterImage upscale(const RasterImage& lr, int k, const Scaler& scaler) {
    require(k >= 1, "scale factor must be positive");
    if (k == 1) return lr;
    const double s = 1.0 / double(k);
    return detail::resample(lr, lr.width() * k, lr.height() * k, s, s, 1.0, 1.0, scaler.kernel);
}

} // namespace bbmr
