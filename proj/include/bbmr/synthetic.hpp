#pragma once

// Deterministic synthetic test images. Uses raw mt19937 output (which the
// standard pins down) rather than std distributions (which it does not).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bbmr/image.hpp"

namespace bbmr::synth {

class Rng {
public:
    explicit Rng(std::uint32_t seed) : engine_(seed) {}

    double uniform() { return double(engine_()) / 4294967296.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint32_t next() { return engine_(); }
    std::uint8_t byte() { return std::uint8_t(engine_() >> 24); }

private:
    std::mt19937 engine_;
};

inline std::uint8_t to_u8(double v) { return std::uint8_t(std::clamp(std::lround(v), 0L, 255L)); }

inline RasterImage flat(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
        }
    return img;
}

inline RasterImage noise(int w, int h, std::uint32_t seed) {
    Rng rng(seed);
    RasterImage img(w, h);
    for (auto& v : img.bytes()) v = rng.byte();
    return img;
}

/// Smooth colour gradient in a random direction with a gentle low-frequency
/// undulation.
inline double smooth_value(double x, double y, int c, const double* p) {
    const double dir = p[0];
    const double u = x * std::cos(dir) + y * std::sin(dir);
    return p[1 + c] + p[4] * u + p[5] * std::sin(2.0 * std::numbers::pi * (x * p[6] + y * p[7]) + c);
}

/// Left half smooth gradient with faint sensor-like grain, right half oriented
/// high-frequency texture whose periods lengthen down the image. Both halves
/// carry the same grain. The split
/// sits a little right of centre so it does not fall on a 128-pixel seam.
inline RasterImage heterogeneous(int w, int h, std::uint32_t seed) {
    Rng rng(seed);
    double smooth[8];
    smooth[0] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int c = 0; c < 3; ++c) smooth[1 + c] = rng.uniform(90.0, 160.0);
    smooth[4] = rng.uniform(0.05, 0.12);
    smooth[5] = rng.uniform(4.0, 10.0);
    smooth[6] = rng.uniform(0.5, 1.5) / w;
    smooth[7] = rng.uniform(0.5, 1.5) / h;

    struct Wave {
        double fx, fy, phase, amp;
    };
    Wave waves[3];
    for (auto& wv : waves) {
        const double period = rng.uniform(8.0, 11.0);
        const double theta = rng.uniform(0.0, std::numbers::pi);
        wv = {std::cos(theta) / period, std::sin(theta) / period, rng.uniform(0.0, 2.0 * std::numbers::pi),
              rng.uniform(20.0, 40.0)};
    }
    const double base = rng.uniform(100.0, 150.0);
    const double grain = rng.uniform(6.0, 10.0);
    const int split = w / 2 + w / 32;

    RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double v;
                if (x < split) {
                    v = smooth_value(x, y, c, smooth) + grain * (rng.uniform() - 0.5);
                } else {
                    // Periods stretch towards the bottom edge.
                    const double stretch = 1.0 + 2.5 * double(y) / h;
                    v = base + 10.0 * c + grain * (rng.uniform() - 0.5);
                    for (const auto& wv : waves)
                        v += wv.amp * std::sin(2.0 * std::numbers::pi * (wv.fx * x + wv.fy * y) / stretch +
                                               wv.phase + 0.3 * c);
                }
                img.at(x, y, c) = to_u8(v);
            }
    return img;
}

/// Smooth gradient with no texture anywhere.
inline RasterImage gradient(int w, int h) {
    RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_u8(x / 2 + y / 2 + 10 * c) ;
    return img;
}

} // namespace bbmr::synth
